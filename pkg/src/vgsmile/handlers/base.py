"""Base handler class for CLI commands."""

import io
from pathlib import Path
import sys
from typing import Any, TextIO

import orjson
import pandas as pd
import structlog

from vgsmile import __version__
from vgsmile.exceptions import VGSmileError
from vgsmile.models.base import Table
from vgsmile.models.config import OutputFormat, RunConfig
from vgsmile.models.errors import ErrorSchema

logger = structlog.get_logger()

JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY


def dumps(payload: Any) -> str:
    """Serialize with sorted keys so that reruns are byte-identical."""
    return orjson.dumps(payload, option=JSON_OPTIONS, default=str).decode()


class BaseHandler:
    """Base handler with common functionality."""

    def __init__(self) -> None:
        """Initialize base handler."""
        self.logger = structlog.get_logger(self.__class__.__name__)

    def format_table(
        self,
        name: str,
        columns: list[str],
        rows: list[list[Any]],
        config: RunConfig | None = None,
        **metadata: Any,
    ) -> Table:
        """Build a table carrying parameters, tool version and tolerances."""
        meta: dict[str, Any] = {"tool": "vgsmile", "version": __version__}
        if config is not None:
            meta.update(config.metadata())
        meta.update(metadata)
        return Table(name=name, columns=columns, rows=rows, metadata=meta)

    def render(self, table: Table, fmt: OutputFormat) -> str:
        """Render a table as CSV with ``# key=value`` header lines, or as JSON."""
        if fmt is OutputFormat.JSON:
            return dumps(
                {
                    "name": table.name,
                    "metadata": table.metadata,
                    "columns": table.columns,
                    "rows": table.rows,
                }
            )

        buffer = io.StringIO()
        for key in sorted(table.metadata):
            value = table.metadata[key]
            text = value if isinstance(value, str) else dumps(value).replace("\n", "")
            buffer.write(f"# {key}={text}\n")
        frame = pd.DataFrame(table.rows, columns=table.columns)
        frame.to_csv(buffer, index=False, lineterminator="\n")
        return buffer.getvalue()

    def write_tables(
        self,
        tables: Table | list[Table],
        fmt: OutputFormat,
        out: Path | None = None,
        stream: TextIO | None = None,
    ) -> list[Path]:
        """Write one table to a file or stdout, or several into a directory.

        Returns:
            The paths written; empty when the output went to the stream.
        """
        batch = tables if isinstance(tables, list) else [tables]
        stream = stream or sys.stdout

        if len(batch) == 1 and (out is None or not out.is_dir()):
            text = self.render(batch[0], fmt)
            if out is None:
                stream.write(text)
                return []
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(text, encoding="utf-8")
            self.logger.info("Table written", path=str(out), rows=len(batch[0].rows))
            return [out]

        directory = out or Path()
        directory.mkdir(parents=True, exist_ok=True)
        paths = []
        for table in batch:
            path = directory / f"{table.name}.{fmt.value}"
            path.write_text(self.render(table, fmt), encoding="utf-8")
            paths.append(path)
            self.logger.info("Table written", path=str(path), rows=len(table.rows))
        return paths

    def format_error_response(
        self,
        err: VGSmileError,
        operation: str | None = None,
    ) -> ErrorSchema:
        """Format an error record."""
        return ErrorSchema(
            status="error",
            message=err.message,
            code=err.code,
            details=err.details,
            operation=operation or err.details.get("operation"),
            bound=getattr(err, "bound", None),
            boundary=getattr(err, "boundary", None),
        )
