"""Smile shape classification and the density-level evidence behind it.

A smile is W-shaped when some level sigma* is crossed exactly four times with
signs +-+-+, and (W+)-shaped when the crossing count is even, at least four,
and starts and ends above the level. Sufficient conditions are geometric
symmetry of the density, semi-heavy tails and a dip of the density at zero
below the matching normal density. Crossings of the model density with a
normal density bound the smile crossings from above.

All counts are taken on finite grids and are therefore lower bounds relative to
the window that was sampled.
"""

from collections.abc import Callable, Sequence
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import optimize
import structlog

from vgsmile.exceptions import (
    DegenerateInputError,
    ParameterValidationError,
    SingularityError,
)
from vgsmile.models.params import Accuracy, MixtureParams
from vgsmile.models.shape import (
    BoundaryReport,
    Classification,
    ConditionChecks,
    CrossingReport,
    DescartesCoefficients,
    DipCheck,
    ShapeReport,
    SymmetryCheck,
)
from vgsmile.models.smile import SmileCurve

from . import implied, pricing, specialfn, vgmodel

logger = structlog.get_logger(__name__)

MIN_CURVE_POINTS = 50
VOL_SIGN_TOL = 1e-9
DENSITY_SIGN_TOL = 1e-12
SYMMETRY_TOL = 1e-8
FALLBACK_LEVELS = 50
WIDEN_FACTOR = 1.5
MAX_WIDENINGS = 3
CROSSING_GRID_POINTS = 8001
W_PATTERN = "+-+-+"


def count_sign_changes(values: Sequence[float] | ArrayLike, tolerance: float) -> tuple[int, str]:
    """Count strict sign alternations, skipping values with magnitude below tolerance.

    Returns:
        The number of changes and the compressed sign sequence, e.g. (4, "+-+-+").

    Raises:
        DegenerateInputError: If every value is within tolerance of zero.
    """
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ParameterValidationError("sign counting requires finite values")
    signs = np.sign(arr[np.abs(arr) >= tolerance])
    signs = signs[signs != 0]
    if signs.size == 0:
        raise DegenerateInputError(
            f"all {arr.size} values are within {tolerance} of zero",
            details={"tolerance": tolerance},
        )
    runs = signs[np.insert(np.diff(signs) != 0, 0, True)]
    sequence = "".join("+" if s > 0 else "-" for s in runs)
    return len(sequence) - 1, sequence


def is_w(sequence: str) -> bool:
    """Exactly four changes with pattern +-+-+."""
    return sequence == W_PATTERN


def is_w_plus(sequence: str) -> bool:
    """An even number of changes, at least four, starting and ending with +."""
    changes = len(sequence) - 1
    return changes >= 4 and changes % 2 == 0 and sequence[0] == "+" and sequence[-1] == "+"


def _local_extrema(vols: NDArray[np.float64]) -> NDArray[np.float64]:
    diffs = np.diff(vols)
    turning = np.flatnonzero(diffs[:-1] * diffs[1:] < 0) + 1
    return vols[np.concatenate(([0], turning, [vols.size - 1]))]


def _has_interior_max(vols: NDArray[np.float64]) -> bool:
    diffs = np.diff(vols)
    return bool(np.any((diffs[:-1] > 0) & (diffs[1:] < 0)))


def candidate_levels(vols: Sequence[float]) -> list[float]:
    """Midpoints of consecutive distinct local-extremum values plus evenly spaced levels.

    Extremum values closer than the vol sign tolerance count as one value, and every
    level lies strictly between the smallest and largest vol.
    """
    arr = np.asarray(vols, dtype=np.float64)
    extrema = np.unique(_local_extrema(arr))
    extrema = extrema[np.insert(np.diff(extrema) > VOL_SIGN_TOL, 0, True)]
    midpoints = (extrema[:-1] + extrema[1:]) / 2.0
    spaced = np.linspace(arr.min(), arr.max(), FALLBACK_LEVELS + 2)[1:-1]
    levels = np.unique(np.concatenate((midpoints, spaced)))
    inside = (levels > arr.min() + VOL_SIGN_TOL) & (levels < arr.max() - VOL_SIGN_TOL)
    return levels[inside].tolist()


def _scan(vols: Sequence[float]) -> dict[str, object]:
    arr = np.asarray(vols, dtype=np.float64)
    w_levels: list[tuple[float, str]] = []
    w_plus_levels: list[tuple[float, str]] = []
    for level in candidate_levels(vols):
        try:
            _, sequence = count_sign_changes(arr - level, VOL_SIGN_TOL)
        except DegenerateInputError:
            continue
        if is_w(sequence):
            w_levels.append((level, sequence))
        elif is_w_plus(sequence):
            w_plus_levels.append((level, sequence))

    if w_levels:
        return {"classification": Classification.W, "levels": w_levels}
    if w_plus_levels:
        return {"classification": Classification.W_PLUS, "levels": w_plus_levels}
    return {"classification": Classification.NOT_W, "levels": []}


def _report(
    curve: SmileCurve,
    widenings: int,
    conditions: ConditionChecks | None,
) -> ShapeReport:
    vols = np.asarray(curve.vols, dtype=np.float64)
    if vols.max() - vols.min() < VOL_SIGN_TOL:
        return ShapeReport(
            classification=Classification.NOT_W,
            log_window=curve.log_window,
            grid_points=len(curve),
            widenings=widenings,
            conditions=conditions,
            diagnostic="constant curve: no level is crossed",
        )

    scan = _scan(curve.vols)
    classification = scan["classification"]
    levels: list[tuple[float, str]] = scan["levels"]  # type: ignore[assignment]
    if not levels:
        _, sequence = count_sign_changes(vols - float(np.median(vols)), VOL_SIGN_TOL)
        return ShapeReport(
            classification=Classification.NOT_W,
            sign_sequence=sequence,
            n_vol=len(sequence) - 1,
            log_window=curve.log_window,
            grid_points=len(curve),
            widenings=widenings,
            conditions=conditions,
            diagnostic="no candidate level yields a W or W+ sign pattern",
        )

    level, sequence = levels[len(levels) // 2]
    return ShapeReport(
        classification=classification,  # type: ignore[arg-type]
        sigma_star=level,
        sigma_star_range=(levels[0][0], levels[-1][0]),
        sign_sequence=sequence,
        n_vol=len(sequence) - 1,
        log_window=curve.log_window,
        grid_points=len(curve),
        widenings=widenings,
        conditions=conditions,
    )


def _needs_widening(curve: SmileCurve) -> bool:
    vols = np.asarray(curve.vols, dtype=np.float64)
    argmin = int(np.argmin(vols))
    return argmin in (0, vols.size - 1) and _has_interior_max(vols)


def classify(
    curve: SmileCurve,
    params: MixtureParams | None = None,
    with_conditions: bool = True,
    accuracy: Accuracy | None = None,
) -> ShapeReport:
    """Classify a smile as W, W+ or neither.

    When the curve ends below a candidate level inside the window (lowest vol at an
    end of the grid with an interior hump), the strike window is widened by 1.5 and
    the smile recomputed, at most three times.

    Raises:
        ParameterValidationError: If the curve has fewer than 50 points.
    """
    if len(curve) < MIN_CURVE_POINTS:
        raise ParameterValidationError(
            f"classification needs at least {MIN_CURVE_POINTS} points, got {len(curve)}"
        )
    params = params or curve.params
    conditions = check_conditions(params, accuracy) if with_conditions else None

    widenings = 0
    report = _report(curve, widenings, conditions)
    while (
        report.classification is Classification.NOT_W
        and widenings < MAX_WIDENINGS
        and _needs_widening(curve)
    ):
        widenings += 1
        window = curve.log_window * WIDEN_FACTOR
        logger.warning("Widening strike window", window=window, widenings=widenings)
        strikes = implied.strike_grid(params.S0, window, len(curve) + len(curve.gaps))
        curve = implied.smile(params, strikes, accuracy)
        report = _report(curve, widenings, conditions)

    logger.info(
        "Smile classified",
        classification=report.classification.value,
        sigma_star=report.sigma_star,
        n_vol=report.n_vol,
        v=params.v,
    )
    return report


def classify_params(
    params: MixtureParams,
    window: float | None = None,
    points: int | None = None,
    with_conditions: bool = True,
    accuracy: Accuracy | None = None,
) -> ShapeReport:
    """Build the smile on a log-spaced grid and classify it."""
    from vgsmile.config import settings

    strikes = implied.strike_grid(
        params.S0,
        window or settings.log_moneyness_window,
        points or settings.grid_points,
    )
    curve = implied.smile(params, strikes, accuracy)
    return classify(curve, params, with_conditions=with_conditions, accuracy=accuracy)


def r_star(params: MixtureParams) -> float:
    """Moment explosion order sup{u : E[exp(u X_T)] < inf}; always finite."""
    return vgmodel.explosion_order(params)


def geometric_symmetry_check(
    params: MixtureParams,
    xs: ArrayLike | None = None,
    tolerance: float = SYMMETRY_TOL,
) -> SymmetryCheck:
    """Max relative deviation of e^(x/2) f(x) from e^(-x/2) f(-x) on a grid."""
    grid = np.asarray(
        xs if xs is not None else np.linspace(-0.3, 0.3, 121), dtype=np.float64
    )
    grid = grid[grid != 0]
    lhs = np.exp(grid / 2.0) * np.asarray(vgmodel.mixture_density(grid, params))
    rhs = np.exp(-grid / 2.0) * np.asarray(vgmodel.mixture_density(-grid, params))
    scale = np.maximum(np.abs(lhs), np.finfo(np.float64).tiny)
    deviation = float(np.max(np.abs(lhs - rhs) / scale))
    return SymmetryCheck(
        passed=deviation < tolerance, max_deviation=deviation, tolerance=tolerance
    )


def dip_condition(density_at_zero: float, atm_vol: float) -> DipCheck:
    """Compare f(0) with the normal density phi at 0 for the ATM vol; strict inequality."""
    normal_at_zero = pricing.bs_gamma_atm(atm_vol)
    return DipCheck(
        passed=density_at_zero < normal_at_zero,
        density_at_zero=density_at_zero,
        normal_at_zero=normal_at_zero,
        atm_vol=atm_vol,
    )


def dip_at_zero(params: MixtureParams, accuracy: Accuracy | None = None) -> DipCheck:
    """Dip-at-zero check for unit spot, from the ATM implied vol of the model."""
    unit = params.normalized()
    quote = pricing.price(1.0, unit, accuracy)
    atm_vol = implied.implied_vol_from_quote(quote).w
    density_at_zero = (
        float(vgmodel.mixture_density(0.0, unit))
        if density_is_finite_at_zero(unit)
        else math.inf
    )
    return dip_condition(density_at_zero, atm_vol)


def check_conditions(params: MixtureParams, accuracy: Accuracy | None = None) -> ConditionChecks:
    """Evaluate the three sufficient conditions for a (W+)-shaped smile."""
    return ConditionChecks(
        geometric_symmetry=geometric_symmetry_check(params),
        semi_heavy_tails=r_star(params),
        dip_at_zero=dip_at_zero(params, accuracy),
    )


def density_is_finite_at_zero(params: MixtureParams) -> bool:
    """f(0) is finite for cT > 1/2 when v > 0, and for cT >= 1 in the double gamma limit."""
    cT = params.cT  # noqa: N806
    return cT >= 1.0 if params.is_double_gamma else cT > 0.5


def default_crossing_grid(params: MixtureParams, sigma_star: float) -> NDArray[np.float64]:
    """Grid on [-L, L], L = max(6 sigma*, tail cutoffs), with x = 0 when f(0) is finite."""
    half_width = max(6.0 * sigma_star, *vgmodel.tail_cutoffs(params))
    grid = np.linspace(-half_width, half_width, CROSSING_GRID_POINTS)
    if density_is_finite_at_zero(params):
        return np.union1d(grid, [0.0])
    return grid[grid != 0]


def _refine(func: Callable[[float], float], left: float, right: float) -> float:
    f_left, f_right = func(left), func(right)
    if f_left == 0:
        return left
    if f_right == 0 or f_left * f_right > 0:
        return right
    return float(optimize.brentq(func, left, right, xtol=1e-14))


def _crossings(
    xs: NDArray[np.float64],
    diff: NDArray[np.float64],
    func: Callable[[float], float],
    tolerance: float,
) -> list[float]:
    keep = np.abs(diff) >= tolerance
    kept_x, kept_d = xs[keep], diff[keep]
    if kept_x.size == 0:
        raise DegenerateInputError("densities agree within tolerance on the whole grid")
    change = np.flatnonzero(np.sign(kept_d[:-1]) != np.sign(kept_d[1:]))
    return [_refine(func, float(kept_x[i]), float(kept_x[i + 1])) for i in change]


def count_density_crossings(
    params: MixtureParams,
    sigma_star: float,
    grid: ArrayLike | None = None,
    tolerance: float = DENSITY_SIGN_TOL,
) -> CrossingReport:
    """Count and locate crossings of the model density with phi at total vol sigma*.

    Raises:
        DegenerateInputError: If the grid has fewer than two points, is not strictly
            increasing, or the densities agree within tolerance everywhere on it.
    """
    xs = (
        default_crossing_grid(params, sigma_star)
        if grid is None
        else np.asarray(grid, dtype=np.float64)
    )
    if xs.size < 2 or np.any(np.diff(xs) <= 0):
        raise DegenerateInputError("crossing grid must hold at least two increasing points")
    if np.any(xs == 0) and not density_is_finite_at_zero(params):
        raise SingularityError("crossing grid contains the density singularity at x = 0")

    def difference(x: float) -> float:
        return float(vgmodel.mixture_density(x, params)) - float(
            pricing.bs_density(x, sigma_star)
        )

    diff = np.asarray(vgmodel.mixture_density(xs, params)) - np.asarray(
        pricing.bs_density(xs, sigma_star)
    )
    roots = _crossings(xs, diff, difference, tolerance)
    logger.debug("Density crossings", sigma_star=sigma_star, n_pdf=len(roots))
    return CrossingReport(sigma_star=sigma_star, n_pdf=len(roots), crossing_xs=roots)


def descartes_coefficients(
    params: MixtureParams, sigma: float, weight: float = 1.0
) -> DescartesCoefficients:
    """Coefficients of log(weight h(x)) - log phi_sigma(x) on (0, inf).

    h is the Gamma(cT, lambda+) density, and the basis is (1, log x, x, x^2). Since
    x g'(x) = a1 + a2 x + 2 a3 x^2 has at most two positive roots, weight * h crosses
    phi_sigma at most three times on (0, inf). The coefficient sign-change count is a
    diagnostic only: for a1 > 0 the log term dominates at 0+ whatever the sign of a0.
    """
    if not sigma > 0:
        raise ParameterValidationError(f"sigma must be > 0, got {sigma}")
    if not weight > 0:
        raise ParameterValidationError(f"weight must be > 0, got {weight}")
    cT = params.cT  # noqa: N806
    lambda_plus, _ = vgmodel.gamma_limit_rates(params)
    a0 = (
        sigma**2 / 8.0
        + 0.5 * math.log(2.0 * math.pi)
        + math.log(sigma)
        + cT * math.log(lambda_plus)
        - float(specialfn.log_gamma(cT))
        + math.log(weight)
    )
    a1 = cT - 1.0
    a2 = -params.lam / params.mu
    a3 = 1.0 / (2.0 * sigma**2)
    nonzero = [a for a in (a0, a1, a2, a3) if a != 0]
    changes = sum(1 for x, y in zip(nonzero, nonzero[1:], strict=False) if x * y < 0)
    return DescartesCoefficients(a0=a0, a1=a1, a2=a2, a3=a3, sign_changes=changes)


def log_abs_difference(
    params: MixtureParams, sigma: float, xs: ArrayLike
) -> NDArray[np.float64]:
    """log |f(x) - phi_sigma(x)| on a grid; -inf where the densities agree exactly."""
    grid = np.asarray(xs, dtype=np.float64)
    diff = np.asarray(vgmodel.mixture_density(grid, params)) - np.asarray(
        pricing.bs_density(grid, sigma)
    )
    with np.errstate(divide="ignore"):
        return np.log(np.abs(diff))


def empirical_shape_boundary(
    params: MixtureParams,
    v_low: float,
    v_high: float,
    tolerance: float = 1e-3,
    max_steps: int = 30,
    window: float | None = None,
    points: int | None = None,
) -> BoundaryReport:
    """Bisect over v for the largest component volatility still classified W.

    The estimate is numerical and relative to the strike window.

    Raises:
        ParameterValidationError: If the range is empty or v_low is not classified W.
    """
    if not 0 <= v_low < v_high:
        raise ParameterValidationError(f"need 0 <= v_low < v_high, got {v_low}, {v_high}")

    def shape_at(v: float) -> Classification:
        report = classify_params(params.with_v(v), window, points, with_conditions=False)
        return report.classification

    if shape_at(v_low) is not Classification.W:
        raise ParameterValidationError(f"v_low = {v_low} is not classified W")
    if shape_at(v_high) is Classification.W:
        logger.info("No shape transition in range", v_low=v_low, v_high=v_high)
        return BoundaryReport(v_w=v_high, v_not_w=None, steps=0, found=False)

    low, high, steps = v_low, v_high, 0
    while high - low > tolerance and steps < max_steps:
        mid = 0.5 * (low + high)
        if shape_at(mid) is Classification.W:
            low = mid
        else:
            high = mid
        steps += 1
        logger.debug("Boundary bisection", low=low, high=high, steps=steps)

    logger.info("Shape boundary bracketed", v_w=low, v_not_w=high, steps=steps)
    return BoundaryReport(v_w=low, v_not_w=high, steps=steps, found=True)
