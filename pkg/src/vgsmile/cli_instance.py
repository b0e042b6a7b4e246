"""Shared command registry for the vgsmile CLI."""

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from vgsmile.models.base import Table

CommandFunc = Callable[..., Table | list[Table]]


@dataclass(frozen=True)
class Argument:
    """A command-specific argparse argument."""

    flags: tuple[str, ...]
    options: dict[str, Any] = field(default_factory=dict)

    @property
    def dest(self) -> str:
        """Namespace attribute argparse stores the value under."""
        return str(self.options.get("dest", self.flags[0].lstrip("-").replace("-", "_")))


def arg(*flags: str, **options: Any) -> Argument:
    """Declare an argument with ``argparse.add_argument`` semantics."""
    return Argument(flags=flags, options=options)


@dataclass(frozen=True)
class Command:
    """A registered command."""

    name: str
    title: str
    description: str
    func: CommandFunc
    arguments: tuple[Argument, ...] = ()


class CommandLineApp:
    """Registry filled by ``@cli.command`` as handler modules are imported."""

    def __init__(self, name: str) -> None:
        """Initialize an empty registry."""
        self.name = name
        self._commands: dict[str, Command] = {}

    def command(
        self,
        name: str,
        title: str,
        description: str,
        arguments: list[Argument] | None = None,
    ) -> Callable[[CommandFunc], CommandFunc]:
        """Register the decorated function as a subcommand."""

        def decorator(func: CommandFunc) -> CommandFunc:
            if name in self._commands:
                raise ValueError(f"command {name!r} registered twice")
            self._commands[name] = Command(
                name=name,
                title=title,
                description=description,
                func=func,
                arguments=tuple(arguments or ()),
            )
            return func

        return decorator

    def get_commands(self) -> dict[str, Command]:
        """Registered commands by name, in registration order."""
        return dict(self._commands)


cli = CommandLineApp("vgsmile")
