"""Shape classification and density-crossing report types."""

from enum import StrEnum

from pydantic import Field, model_validator

from .base import DomainModel


class Classification(StrEnum):
    """Smile shape classes."""

    W = "W"
    W_PLUS = "W+"
    NOT_W = "NOT_W"


class SymmetryCheck(DomainModel):
    """Outcome of the geometric-symmetry check of the density."""

    passed: bool = Field(..., description="Whether the max deviation is below tolerance")
    max_deviation: float = Field(..., ge=0, description="Max relative deviation on the grid")
    tolerance: float = Field(..., gt=0, description="Pass threshold")


class DipCheck(DomainModel):
    """Both sides of the dip-at-zero inequality f(0) < phi_sigma(S0)(0)."""

    passed: bool = Field(..., description="Whether the strict inequality holds")
    density_at_zero: float = Field(..., ge=0, description="Left side f(0)")
    normal_at_zero: float = Field(..., gt=0, description="Right side phi(0) at the ATM vol")
    atm_vol: float = Field(..., gt=0, description="ATM implied total volatility")


class ConditionChecks(DomainModel):
    """The three sufficient conditions for a (W+)-shaped smile."""

    geometric_symmetry: SymmetryCheck
    semi_heavy_tails: float = Field(..., gt=0, description="Moment explosion order r*")
    dip_at_zero: DipCheck

    @property
    def all_passed(self) -> bool:
        """Whether all three conditions hold (r* is always finite here)."""
        return self.geometric_symmetry.passed and self.dip_at_zero.passed


class ShapeReport(DomainModel):
    """Smile classification and the evidence behind it."""

    classification: Classification
    sigma_star: float | None = Field(None, description="Level achieving the classification")
    sigma_star_range: tuple[float, float] | None = Field(
        None, description="Lowest and highest candidate level achieving it"
    )
    sign_sequence: str = Field(default="", description="Signs of sigma(K) - sigma_star")
    n_vol: int = Field(default=0, ge=0, description="Sign changes at sigma_star")
    conditions: ConditionChecks | None = None
    log_window: float = Field(..., gt=0, description="Log-moneyness half-width used")
    grid_points: int = Field(..., ge=1, description="Number of strikes classified")
    widenings: int = Field(default=0, ge=0, description="Times the strike window was widened")
    diagnostic: str | None = Field(None, description="Why no shape was certified")

    @model_validator(mode="after")
    def validate_pattern(self) -> "ShapeReport":
        """Tie the classification to its sign pattern."""
        if self.classification is Classification.W and (
            self.n_vol != 4 or self.sign_sequence != "+-+-+"
        ):
            raise ValueError("W requires exactly four sign changes +-+-+")
        if self.classification is Classification.W_PLUS and not (
            self.n_vol >= 4
            and self.n_vol % 2 == 0
            and self.sign_sequence.startswith("+")
            and self.sign_sequence.endswith("+")
        ):
            raise ValueError("W+ requires an even count >= 4 starting and ending with +")
        return self


class CrossingReport(DomainModel):
    """Crossings of the model density with a Black-Scholes normal density."""

    sigma_star: float = Field(..., gt=0, description="Total volatility of the normal")
    n_pdf: int = Field(..., ge=0, description="Number of crossings")
    crossing_xs: list[float] = Field(default_factory=list, description="Crossing abscissae")

    @model_validator(mode="after")
    def validate_count(self) -> "CrossingReport":
        """One abscissa per crossing."""
        if len(self.crossing_xs) != self.n_pdf:
            raise ValueError("crossing_xs must hold one abscissa per crossing")
        return self


class DescartesCoefficients(DomainModel):
    """Coefficients of log h(x) - log phi(x) on (0, inf) in the basis (1, log x, x, x^2).

    ``sign_changes`` is reported for inspection; it does not bound the crossings.
    """

    a0: float
    a1: float
    a2: float
    a3: float
    sign_changes: int = Field(..., ge=0, le=3)


class BoundaryReport(DomainModel):
    """Numerically observed largest v with a W-shaped smile (bisection estimate)."""

    v_w: float = Field(..., ge=0, description="Largest tested v classified W")
    v_not_w: float | None = Field(None, description="Smallest tested v not classified W")
    steps: int = Field(..., ge=0, description="Bisection steps taken")
    found: bool = Field(..., description="Whether a transition was bracketed")
    numerical: bool = Field(default=True, description="Always true: an empirical estimate")
