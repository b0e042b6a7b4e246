"""Model parameter types for the variance-gamma mixture."""

from enum import StrEnum
import math

from pydantic import Field, field_validator, model_validator

from .base import DomainModel


class Sign(StrEnum):
    """Mixture component selector."""

    PLUS = "+"
    MINUS = "-"

    @property
    def factor(self) -> float:
        """Return +1.0 for the upward-drift component and -1.0 otherwise."""
        return 1.0 if self is Sign.PLUS else -1.0


class Accuracy(DomainModel):
    """Tolerances shared by quadrature, series and root finders."""

    rel_tol: float = Field(default=1e-12, gt=0, description="Relative tolerance")
    abs_tol: float = Field(default=1e-14, gt=0, description="Absolute tolerance")
    max_iter: int = Field(default=200, ge=1, description="Iteration / subdivision cap")

    @classmethod
    def from_settings(cls) -> "Accuracy":
        """Build the process default from ``Settings``."""
        from vgsmile.config import settings

        return cls(
            rel_tol=settings.rel_tol,
            abs_tol=settings.abs_tol,
            max_iter=settings.max_iter,
        )


class MixtureParams(DomainModel):
    """Free parameters of the two-component variance-gamma mixture."""

    v: float = Field(..., ge=0, description="Component volatility (0 = double gamma)")
    c: float = Field(..., gt=0, description="Gamma shape rate per unit time")
    lam: float = Field(..., gt=0, alias="lambda", description="Gamma rate")
    mu: float = Field(..., gt=0, description="Drift divergence")
    T: float = Field(default=1.0, gt=0, description="Horizon in years")
    S0: float = Field(default=1.0, gt=0, description="Spot price")

    @field_validator("v", "c", "lam", "mu", "T", "S0")
    @classmethod
    def validate_finite(cls, value: float) -> float:
        """Reject infinities and NaN."""
        if not math.isfinite(value):
            raise ValueError("parameter must be finite")
        return value

    @model_validator(mode="after")
    def validate_drift_bound(self) -> "MixtureParams":
        """Enforce mu < 2 * lambda; equality degenerates the mixture (b = 0)."""
        if self.mu >= 2.0 * self.lam:
            raise ValueError(
                f"constraint mu < 2*lambda violated: mu={self.mu} >= 2*lambda={2.0 * self.lam}"
            )
        return self

    @property
    def cT(self) -> float:  # noqa: N802
        """Gamma shape at the horizon."""
        return self.c * self.T

    @property
    def is_double_gamma(self) -> bool:
        """Whether v = 0 selects the double-gamma limit."""
        return self.v == 0.0

    def with_v(self, v: float) -> "MixtureParams":
        """Return a copy with a different component volatility."""
        return MixtureParams(v=v, c=self.c, lam=self.lam, mu=self.mu, T=self.T, S0=self.S0)

    def normalized(self) -> "MixtureParams":
        """Return a copy with unit spot."""
        return MixtureParams(v=self.v, c=self.c, lam=self.lam, mu=self.mu, T=self.T, S0=1.0)


class ComponentParams(DomainModel):
    """Derived (alpha, beta, c)-parameterization and mixture weights."""

    alpha: float | None = Field(None, gt=0, description="Tail steepness; absent for v = 0")
    beta_plus: float | None = Field(None, description="Skew of the + component")
    beta_minus: float | None = Field(None, description="Skew of the - component")
    gamma_plus: float | None = Field(None, ge=0, description="Normalizer of f+")
    gamma_minus: float | None = Field(None, ge=0, description="Normalizer of f-")
    log_gamma_plus: float | None = Field(None, description="log of gamma_plus")
    log_gamma_minus: float | None = Field(None, description="log of gamma_minus")
    cT: float = Field(..., gt=0, description="Gamma shape at the horizon")
    lambda_plus: float = Field(..., gt=0, description="lambda/mu + 1/2")
    lambda_minus: float = Field(..., gt=0, description="lambda/mu - 1/2")
    a: float = Field(..., gt=0, description="(1 + mu/(2 lambda))^cT")
    b: float = Field(..., gt=0, description="(1 - mu/(2 lambda))^cT")
    p: float = Field(..., gt=0, lt=1, description="Weight a/(a+b) of the - component")

    @property
    def weight_minus(self) -> float:
        """Mixture weight a/(a+b) of f-."""
        return self.p

    @property
    def weight_plus(self) -> float:
        """Mixture weight b/(a+b) of f+."""
        return 1.0 - self.p

    @property
    def has_bessel_form(self) -> bool:
        """Whether the (alpha, beta) fields are present (v > 0)."""
        return self.alpha is not None

    def beta(self, sign: Sign) -> float:
        """Return beta for a component."""
        value = self.beta_plus if sign is Sign.PLUS else self.beta_minus
        if value is None:
            raise ValueError("beta is undefined for v = 0")
        return value

    def log_gamma(self, sign: Sign) -> float:
        """Return log gamma for a component."""
        value = self.log_gamma_plus if sign is Sign.PLUS else self.log_gamma_minus
        if value is None:
            raise ValueError("gamma is undefined for v = 0")
        return value

    def weight(self, sign: Sign) -> float:
        """Return the mixture weight of a component."""
        return self.weight_plus if sign is Sign.PLUS else self.weight_minus

    def limit_rate(self, sign: Sign) -> float:
        """Return the Gamma rate of the v = 0 limit component."""
        return self.lambda_plus if sign is Sign.PLUS else self.lambda_minus


class StdVGParams(DomainModel):
    """Standard (sigma, theta, kappa)-parameterization of one component."""

    sigma_vg: float = Field(..., gt=0, description="Brownian volatility")
    theta: float = Field(..., description="Brownian drift")
    kappa: float = Field(..., gt=0, description="Variance rate of the time change")
    sign: Sign = Field(..., description="Component")


class DensityGrid(DomainModel):
    """Density values sampled on strictly increasing log-price abscissae."""

    xs: list[float] = Field(..., min_length=1, description="Log-price abscissae")
    values: list[float] = Field(..., min_length=1, description="Density per unit log-price")

    @model_validator(mode="after")
    def validate_grid(self) -> "DensityGrid":
        """Check ordering, length and nonnegativity."""
        if len(self.xs) != len(self.values):
            raise ValueError("xs and values must have the same length")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:], strict=False)):
            raise ValueError("xs must be strictly increasing")
        if any(value < 0 for value in self.values):
            raise ValueError("density values must be nonnegative")
        return self


class OneSidedLimits(DomainModel):
    """Left and right limits of the double-gamma density at x = 0."""

    left: float = Field(..., description="Limit from x < 0")
    right: float = Field(..., description="Limit from x > 0")
    continuous: bool = Field(..., description="Whether both limits are finite and agree")
