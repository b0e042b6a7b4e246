"""Implied-volatility curve types."""

import math

from pydantic import Field, model_validator

from .base import DomainModel
from .params import MixtureParams


class SmileCurve(DomainModel):
    """Implied total volatilities sampled over a strike grid."""

    strikes: list[float] = Field(..., min_length=1, description="Strictly increasing strikes")
    vols: list[float] = Field(..., min_length=1, description="Total volatility per strike")
    S0: float = Field(..., gt=0, description="Spot price")
    params: MixtureParams = Field(..., description="Model parameters the curve came from")
    gaps: list[float] = Field(
        default_factory=list,
        description="Requested strikes dropped because the option value is negligible",
    )

    @model_validator(mode="after")
    def validate_curve(self) -> "SmileCurve":
        """Check lengths, ordering and positivity."""
        if len(self.strikes) != len(self.vols):
            raise ValueError("strikes and vols must have the same length")
        if any(b <= a for a, b in zip(self.strikes, self.strikes[1:], strict=False)):
            raise ValueError("strikes must be strictly increasing")
        if any(k <= 0 for k in self.strikes):
            raise ValueError("strikes must be positive")
        if any(w <= 0 for w in self.vols):
            raise ValueError("vols must be positive")
        return self

    @property
    def log_window(self) -> float:
        """Largest absolute log-moneyness of the requested grid, gaps included."""
        return max(abs(math.log(k / self.S0)) for k in [*self.strikes, *self.gaps])

    def __len__(self) -> int:
        return len(self.strikes)


class AtmCurvature(DomainModel):
    """Second strike-derivative of the smile at the money, computed two ways."""

    finite_difference: float = Field(..., description="Central second difference of the smile")
    formula: float = Field(..., description="(C''(S0) - BS gamma) / BS vega")
    atm_vol: float = Field(..., gt=0, description="sigma(S0)")
    density_at_zero: float = Field(..., ge=0, description="f(0), equal to C''(S0) at unit spot")
    bs_gamma: float = Field(..., gt=0, description="Black-Scholes gamma at the money")
    vega: float = Field(..., gt=0, description="Black-Scholes vega at the money")

    @property
    def relative_gap(self) -> float:
        """Relative disagreement between the two computations."""
        scale = max(abs(self.formula), abs(self.finite_difference), 1e-300)
        return abs(self.formula - self.finite_difference) / scale
