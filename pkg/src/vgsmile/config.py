"""Configuration management for vgsmile."""

from enum import StrEnum

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class LogFormat(StrEnum):
    """Log renderer selection."""

    JSON = "json"
    TEXT = "text"


class Settings(BaseSettings):
    """Process-level settings, read from the environment and ``.env``."""

    model_config = SettingsConfigDict(
        env_prefix="VGSMILE_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging Configuration
    log_level: str = Field(
        default="WARNING", description="Logging level (DEBUG, INFO, WARNING, ERROR)"
    )
    log_format: LogFormat = Field(
        default=LogFormat.TEXT, description="Log format (json or text)"
    )

    # Numerical accuracy
    rel_tol: float = Field(default=1e-12, gt=0, description="Relative tolerance")
    abs_tol: float = Field(default=1e-14, gt=0, description="Absolute tolerance")
    max_iter: int = Field(
        default=200, ge=1, description="Iteration cap for series and root finders"
    )
    quad_limit: int = Field(
        default=200, ge=1, description="Subinterval limit for adaptive quadrature"
    )

    # Strike grid
    grid_points: int = Field(
        default=201, ge=50, description="Number of strikes in a smile grid"
    )
    log_moneyness_window: float = Field(
        default=0.15, gt=0, description="Half-width of the strike window in log-moneyness"
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        v = v.upper()
        if v not in valid_levels:
            raise ValueError(f"Invalid log level. Must be one of: {valid_levels}")
        return v

    @field_validator("log_format", mode="before")
    @classmethod
    def normalize_case(cls, v: str | StrEnum | None) -> str | StrEnum | None:
        if isinstance(v, str):
            return v.lower()
        return v


def get_settings() -> Settings:
    """Get application settings singleton."""
    return Settings()


# Global settings instance
settings = get_settings()
