from typing import Any

from pydantic import BaseModel, Field


class ErrorSchema(BaseModel):
    """One-line error record written to stderr when a command fails."""

    success: bool = False
    status: str | None = None
    message: str | None = None
    code: Any | None = None
    details: Any | None = None
    operation: str | None = Field(default=None, description="Numerical operation that failed")
    bound: str | None = Field(default=None, description="Violated price bound, lower or upper")
    boundary: float | None = Field(default=None, description="Domain boundary that was crossed")
