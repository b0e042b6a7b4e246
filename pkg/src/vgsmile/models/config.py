"""Per-run configuration assembled from flags, a TOML file, the environment and defaults."""

from enum import StrEnum
from pathlib import Path
from typing import Any

from pydantic import Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict, TomlConfigSettingsSource

from vgsmile.exceptions import ParameterValidationError

from .params import Accuracy, MixtureParams


class OutputFormat(StrEnum):
    """Table serialization."""

    CSV = "csv"
    JSON = "json"


class RunConfig(BaseSettings):
    """One CLI run. Defaults are the baseline set c = 2, T = 1, lambda = 0.5, mu = 0.02, v = 0.02."""

    model_config = SettingsConfigDict(
        env_prefix="VGSMILE_",
        case_sensitive=False,
        extra="ignore",
    )

    # Model parameters
    v: float = Field(default=0.02, ge=0, description="Component volatility")
    c: float = Field(default=2.0, gt=0, description="Gamma shape rate per unit time")
    lam: float = Field(default=0.5, gt=0, description="Gamma rate (flag --lambda)")
    mu: float = Field(default=0.02, gt=0, description="Drift divergence")
    T: float = Field(default=1.0, gt=0, description="Horizon in years")
    S0: float = Field(default=1.0, gt=0, description="Spot price")

    # Strike grid
    grid_points: int = Field(default=201, ge=50, description="Strikes per smile")
    log_moneyness_window: float = Field(
        default=0.15, gt=0, description="Half-width of the strike window"
    )

    # Accuracy
    rel_tol: float = Field(default=1e-12, gt=0, description="Relative tolerance")
    abs_tol: float = Field(default=1e-14, gt=0, description="Absolute tolerance")
    max_iter: int = Field(default=200, ge=1, description="Iteration cap")

    # Output
    format: OutputFormat = Field(default=OutputFormat.CSV, description="csv or json")
    out: Path | None = Field(default=None, description="Output file or directory")
    seed: int = Field(default=0, ge=0, description="Seed for sampler-based checks")

    @model_validator(mode="after")
    def validate_model(self) -> "RunConfig":
        """Revalidate the model constraints, mu < 2 lambda included."""
        MixtureParams(v=self.v, c=self.c, lam=self.lam, mu=self.mu, T=self.T, S0=self.S0)
        return self

    @property
    def params(self) -> MixtureParams:
        """Model parameters of this run."""
        return MixtureParams(v=self.v, c=self.c, lam=self.lam, mu=self.mu, T=self.T, S0=self.S0)

    @property
    def accuracy(self) -> Accuracy:
        """Accuracy of this run."""
        return Accuracy(rel_tol=self.rel_tol, abs_tol=self.abs_tol, max_iter=self.max_iter)

    def metadata(self) -> dict[str, Any]:
        """Parameters and tolerances recorded with every emitted table."""
        return self.model_dump(
            mode="json", include={"v", "c", "lam", "mu", "T", "S0", "rel_tol", "abs_tol", "seed"}
        )


def _normalize_keys(values: dict[str, Any]) -> dict[str, Any]:
    normalized = {key.replace("-", "_"): value for key, value in values.items()}
    if "lambda" in normalized:
        normalized["lam"] = normalized.pop("lambda")
    return normalized


def load_run_config(
    cli_values: dict[str, Any] | None = None, config_path: Path | None = None
) -> RunConfig:
    """Merge flags over the TOML file over the environment over defaults.

    Raises:
        ParameterValidationError: If the file is missing or any value is invalid.
    """
    file_values: dict[str, Any] = {}
    if config_path is not None:
        if not config_path.is_file():
            raise ParameterValidationError(f"config file not found: {config_path}")
        file_values = _normalize_keys(TomlConfigSettingsSource(RunConfig, toml_file=config_path)())

    flags = {key: value for key, value in _normalize_keys(cli_values or {}).items() if value is not None}
    try:
        return RunConfig(**{**file_values, **flags})
    except ValidationError as e:
        messages = "; ".join(err["msg"] for err in e.errors())
        raise ParameterValidationError(
            f"Invalid run configuration: {messages}",
            details={"errors": e.errors(include_url=False, include_context=False)},
        ) from e
