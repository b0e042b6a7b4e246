"""Option quote and volatility types."""

import math

from pydantic import Field, model_validator

from .base import DomainModel

# Slack for the static no-arbitrage bounds; prices come from quadrature.
BOUND_SLACK = 1e-12


class TotalVol(DomainModel):
    """Black-Scholes volatility aggregated over the whole horizon (sigma * sqrt(T))."""

    w: float = Field(..., gt=0, description="Total volatility")

    def annualized(self, T: float) -> float:  # noqa: N803
        """Convert to a per-year volatility."""
        return self.w / math.sqrt(T)


class Quote(DomainModel):
    """Call and put value at one strike, zero rates."""

    strike: float = Field(..., gt=0, description="Strike, same units as S0")
    call: float = Field(..., ge=0, description="Call value")
    put: float = Field(..., ge=0, description="Put value")
    S0: float = Field(..., gt=0, description="Spot price")

    @model_validator(mode="after")
    def validate_bounds(self) -> "Quote":
        """Check the intrinsic-value lower bounds."""
        if self.call < max(self.S0 - self.strike, 0.0) - BOUND_SLACK * self.S0:
            raise ValueError("call below intrinsic value")
        if self.put < max(self.strike - self.S0, 0.0) - BOUND_SLACK * self.S0:
            raise ValueError("put below intrinsic value")
        return self

    @property
    def parity_residual(self) -> float:
        """C - P - (S0 - K); zero under put-call parity."""
        return self.call - self.put - (self.S0 - self.strike)

    @property
    def out_of_the_money(self) -> float:
        """Value of the out-of-the-money leg (call for K >= S0, put otherwise)."""
        return self.call if self.strike >= self.S0 else self.put
