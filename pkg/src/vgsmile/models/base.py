"""Base Pydantic models for vgsmile domain types."""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class DomainModel(BaseModel):
    """Base model for immutable domain values."""

    model_config = ConfigDict(
        frozen=True,
        use_enum_values=False,
        populate_by_name=True,
        arbitrary_types_allowed=True,
    )


class Table(BaseModel):
    """A named table of rows with its provenance metadata."""

    name: str = Field(..., description="Table name, used as file stem")
    columns: list[str] = Field(..., min_length=1, description="Column names")
    rows: list[list[Any]] = Field(default_factory=list, description="Row values")
    metadata: dict[str, Any] = Field(
        default_factory=dict, description="Parameters, tool version and tolerances"
    )
