"""Command-line entry point for vgsmile."""

import argparse
from collections.abc import Sequence
import logging
from pathlib import Path
import sys
from typing import Any

import orjson
from pydantic import ValidationError
import structlog

# Import handler modules (they register their commands on import)
from vgsmile.handlers import (  # noqa: F401
    density,
    figures,
    pricing,
    shape,
    smile,
)

from .cli_instance import Command, cli
from .config import LogFormat, Settings, settings
from .exceptions import NumericalError, ParameterValidationError, VGSmileError
from .handlers.base import BaseHandler
from .models.config import OutputFormat, load_run_config
from .models.errors import ErrorSchema

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

# Flags shared by every command; dest names match RunConfig fields.
COMMON_FLAGS: list[tuple[str, dict[str, Any]]] = [
    ("--v", {"type": float, "help": "Component volatility (0 = double gamma)"}),
    ("--c", {"type": float, "help": "Gamma shape rate per unit time"}),
    ("--lambda", {"type": float, "dest": "lam", "help": "Gamma rate"}),
    ("--mu", {"type": float, "help": "Drift divergence, mu < 2 lambda"}),
    ("--T", {"type": float, "dest": "T", "help": "Horizon in years"}),
    ("--S0", {"type": float, "dest": "S0", "help": "Spot price"}),
    ("--grid-points", {"type": int, "help": "Strikes per smile"}),
    ("--log-moneyness-window", {"type": float, "help": "Half-width of the strike window"}),
    ("--rel-tol", {"type": float, "help": "Relative tolerance"}),
    ("--abs-tol", {"type": float, "help": "Absolute tolerance"}),
    ("--format", {"choices": [f.value for f in OutputFormat], "help": "Output format"}),
    ("--out", {"type": Path, "help": "Output file (directory for figures)"}),
    ("--seed", {"type": int, "help": "Seed for sampler-based output"}),
]
RUN_CONFIG_KEYS = [
    "v", "c", "lam", "mu", "T", "S0", "grid_points", "log_moneyness_window",
    "rel_tol", "abs_tol", "format", "out", "seed",
]  # fmt: skip


def configure_logging(current: Settings) -> None:
    """Configure structlog; logs go to stderr so stdout carries only data."""
    logging.basicConfig(
        level=getattr(logging, current.log_level),
        stream=sys.stderr,
        format="%(message)s",
        force=True,
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            (
                structlog.processors.JSONRenderer()
                if current.log_format == LogFormat.JSON
                else structlog.dev.ConsoleRenderer(colors=False)
            ),
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )


def _add_command(subparsers: Any, command: Command, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        command.name,
        parents=[parent],
        help=command.title,
        description=command.description,
    )
    for argument in command.arguments:
        parser.add_argument(*argument.flags, **argument.options)
    parser.set_defaults(command=command)


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser from the registered commands."""
    common = argparse.ArgumentParser(add_help=False)
    for flag, options in COMMON_FLAGS:
        common.add_argument(flag, **options)
    common.add_argument("--config", type=Path, help="TOML file with flag-named keys")
    common.add_argument("--log-level", help="Override VGSMILE_LOG_LEVEL")
    common.add_argument(
        "--log-format",
        choices=[f.value for f in LogFormat],
        help="Override VGSMILE_LOG_FORMAT",
    )

    parser = argparse.ArgumentParser(
        prog="vgsmile",
        description="Variance-gamma mixture pricing, smiles and smile shapes.",
    )
    subparsers = parser.add_subparsers(dest="command_name", required=True)
    for command in cli.get_commands().values():
        _add_command(subparsers, command, common)
    return parser


def _emit_error(record: ErrorSchema) -> None:
    # one line, so callers can take the last line of stderr
    sys.stderr.write(orjson.dumps(record.model_dump(), default=str).decode() + "\n")


def run(args: argparse.Namespace) -> int:
    """Execute a parsed command and return the exit code."""
    logger = structlog.get_logger()
    handler = BaseHandler()
    command: Command = args.command
    values = vars(args)

    try:
        config = load_run_config({key: values[key] for key in RUN_CONFIG_KEYS}, args.config)
        options = {argument.dest: values[argument.dest] for argument in command.arguments}
        logger.info("Running command", command=command.name, v=config.v)
        tables = command.func(config, **options)
        handler.write_tables(tables, config.format, config.out)
    except (ParameterValidationError, ValidationError) as e:
        err = (
            e
            if isinstance(e, ParameterValidationError)
            else ParameterValidationError(str(e), details={"errors": e.errors()})
        )
        _emit_error(handler.format_error_response(err, operation=command.name))
        return EXIT_VALIDATION
    except NumericalError as e:
        _emit_error(handler.format_error_response(e))
        return EXIT_NUMERICAL
    except VGSmileError as e:
        _emit_error(handler.format_error_response(e, operation=command.name))
        return EXIT_VALIDATION
    except Exception as e:
        logger.exception("Unexpected failure", command=command.name)
        _emit_error(
            ErrorSchema(status="error", message=str(e), code="UNEXPECTED", operation=command.name)
        )
        return EXIT_UNEXPECTED
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Console entry point."""
    args = build_parser().parse_args(argv)
    overrides = {
        key: value
        for key, value in (("log_level", args.log_level), ("log_format", args.log_format))
        if value is not None
    }
    current = Settings(**overrides) if overrides else settings
    configure_logging(current)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
