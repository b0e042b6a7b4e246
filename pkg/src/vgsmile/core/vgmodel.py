"""Two-component variance-gamma mixture and its double-gamma limit.

The mixture is X = M * Y- + (1 - M) * Y+ with M ~ Bernoulli(p) and Y+/- variance
gamma with opposite drifts. Densities are evaluated in log space from the
(alpha, beta, c)-parameterization; v = 0 is the asymmetric double gamma law and
is handled as its own closed form rather than a tiny-v approximation.

Scalar inputs return floats, array inputs return arrays.
"""

from functools import lru_cache
import math
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import ValidationError
import structlog

from vgsmile.exceptions import (
    DomainError,
    NotRepresentableError,
    ParameterValidationError,
    SingularityError,
)
from vgsmile.models.params import (
    ComponentParams,
    DensityGrid,
    MixtureParams,
    OneSidedLimits,
    Sign,
    StdVGParams,
)

from . import specialfn

logger = structlog.get_logger(__name__)

LOG_SQRT_2_OVER_PI = 0.5 * math.log(2.0 / math.pi)

# Truncation point in units of the tail rate: Gamma-type tails beyond
# (cT + 12 sqrt(cT) + 50) / rate carry less than e^-50 of the mass.
TAIL_SIGMAS = 12.0
TAIL_EXPONENT = 50.0

Scalar = float | NDArray[np.float64]


def _as_array(x: ArrayLike) -> tuple[NDArray[np.float64], bool]:
    return np.asarray(x, dtype=np.float64), np.ndim(x) == 0


def _unwrap(values: NDArray[np.float64], scalar: bool) -> Scalar:
    return float(values) if scalar else values


def make_params(**kwargs: Any) -> MixtureParams:
    """Build ``MixtureParams``, turning pydantic errors into validation errors.

    Raises:
        ParameterValidationError: If any constraint is violated; the message quotes it.
    """
    try:
        return MixtureParams(**kwargs)
    except ValidationError as e:
        messages = "; ".join(err["msg"] for err in e.errors())
        raise ParameterValidationError(
            f"Invalid model parameters: {messages}",
            details={"errors": e.errors(include_url=False, include_context=False)},
        ) from e


@lru_cache(maxsize=256)
def derive(params: MixtureParams) -> ComponentParams:
    """Derive (alpha, beta+/-, gamma+/-) and the mixture weights (a, b, p)."""
    cT = params.cT  # noqa: N806
    ratio = params.mu / (2.0 * params.lam)
    a = (1.0 + ratio) ** cT
    b = (1.0 - ratio) ** cT
    fields: dict[str, Any] = {
        "cT": cT,
        "lambda_plus": params.lam / params.mu + 0.5,
        "lambda_minus": params.lam / params.mu - 0.5,
        "a": a,
        "b": b,
        "p": a / (a + b),
    }

    if not params.is_double_gamma:
        v2 = params.v**2
        drift = params.mu / v2
        log_norm = LOG_SQRT_2_OVER_PI - float(specialfn.log_gamma(cT))
        log_gamma_plus = log_norm + cT * math.log((params.lam + params.mu / 2.0) / v2)
        log_gamma_minus = log_norm + cT * math.log((params.lam - params.mu / 2.0) / v2)
        fields.update(
            alpha=math.sqrt(drift**2 + 2.0 * params.lam / v2 + 0.25),
            beta_plus=drift - 0.5,
            beta_minus=-drift - 0.5,
            gamma_plus=float(np.exp(log_gamma_plus)),
            gamma_minus=float(np.exp(log_gamma_minus)),
            log_gamma_plus=log_gamma_plus,
            log_gamma_minus=log_gamma_minus,
        )

    return ComponentParams(**fields)


def ell(u: ArrayLike, c: float, lam: float) -> Scalar:
    """Laplace exponent of the Gamma process, -c log(1 - u/lambda), for u < lambda.

    Raises:
        DomainError: If u reaches the singularity at lambda.
    """
    us, scalar = _as_array(u)
    if np.any(us >= lam):
        raise DomainError(f"ell is singular at u = lambda = {lam}", boundary=lam)
    return _unwrap(-c * np.log1p(-us / lam), scalar)


def ell_pm(u: ArrayLike, sign: Sign, params: MixtureParams) -> Scalar:
    """Tilted exponent ell(u -/+ mu/2) - ell(-/+ mu/2) of one component."""
    shift = sign.factor * params.mu / 2.0
    us, scalar = _as_array(u)
    if np.any(us - shift >= params.lam):
        raise DomainError(
            f"ell{sign.value} is singular at u = {params.lam + shift}",
            boundary=params.lam + shift,
        )
    value = ell(us - shift, params.c, params.lam) - ell(-shift, params.c, params.lam)
    return _unwrap(np.asarray(value), scalar)


def psi(u: ArrayLike, sign: Sign, params: MixtureParams) -> Scalar:
    """Characteristic exponent psi+/-(u) = ell+/-(v^2 (u^2 - u)/2 +/- mu u)."""
    us, scalar = _as_array(u)
    inner = params.v**2 * (us * us - us) / 2.0 + sign.factor * params.mu * us
    return _unwrap(np.asarray(ell_pm(inner, sign, params)), scalar)


def component_mgf(u: ArrayLike, sign: Sign, params: MixtureParams) -> Scalar:
    """E[exp(u Y+/-_T)] = exp(T psi+/-(u))."""
    us, scalar = _as_array(u)
    return _unwrap(np.exp(params.T * np.asarray(psi(us, sign, params))), scalar)


def _positive_root(a: float, b: float, c: float) -> float:
    # a > 0, c < 0: exactly one positive root, taken in the cancellation-free form.
    sq = math.sqrt(b * b - 4.0 * a * c)
    if b >= 0:
        return 2.0 * (-c) / (b + sq)
    return (-b + sq) / (2.0 * a)


def explosion_order(params: MixtureParams) -> float:
    """Return r* = sup{u : m(u) < inf}, the right tail's exponential decay rate."""
    if params.is_double_gamma:
        return params.lam / params.mu + 0.5
    half_v2 = params.v**2 / 2.0
    roots = [
        _positive_root(
            half_v2,
            sign.factor * params.mu - half_v2,
            -sign.factor * params.mu / 2.0 - params.lam,
        )
        for sign in Sign
    ]
    return min(roots)


def finiteness_interval(params: MixtureParams) -> tuple[float, float]:
    """Open interval (1 - r*, r*) on which the mixture MGF is finite."""
    r_star = explosion_order(params)
    return 1.0 - r_star, r_star


def mgf(u: ArrayLike, params: MixtureParams) -> Scalar:
    """Moment generating function m(u) = E[exp(u X_T)] of the mixture.

    Raises:
        DomainError: If u lies outside the finiteness interval.
    """
    us, scalar = _as_array(u)
    lower, upper = finiteness_interval(params)
    if np.any(us <= lower) or np.any(us >= upper):
        raise DomainError(
            f"m(u) is finite only for u in ({lower}, {upper})",
            boundary=upper if np.any(us >= upper) else lower,
        )
    comp = derive(params)
    q = params.v**2 * (us * us - us) / 2.0
    half_mu = params.mu / 2.0
    total = np.exp(params.T * np.asarray(ell(q - params.mu * us + half_mu, params.c, params.lam)))
    total = total + np.exp(
        params.T * np.asarray(ell(q + params.mu * us - half_mu, params.c, params.lam))
    )
    return _unwrap(comp.a * comp.b / (comp.a + comp.b) * total, scalar)


def gamma_limit_rates(params: MixtureParams) -> tuple[float, float]:
    """Return (lambda+, lambda-) = (lambda/mu + 1/2, lambda/mu - 1/2)."""
    comp = derive(params)
    return comp.lambda_plus, comp.lambda_minus


def alpha_beta_gaps(params: MixtureParams) -> tuple[float, float]:
    """Return (alpha - beta+, alpha + beta-), the right and left tail decay rates.

    Both tend to (lambda+, lambda-) as v -> 0, and v = 0 returns that limit.
    """
    if params.is_double_gamma:
        return gamma_limit_rates(params)
    comp = derive(params)
    v2 = params.v**2
    drift = params.mu / v2
    assert comp.alpha is not None  # noqa: S101
    # alpha - mu/v^2 without cancellation
    excess = (2.0 * params.lam / v2 + 0.25) / (comp.alpha + drift)
    return excess + 0.5, excess - 0.5


def tail_cutoffs(params: MixtureParams) -> tuple[float, float]:
    """Distances (left, right) from 0 beyond which the density mass is negligible."""
    cT = params.cT  # noqa: N806
    reach = cT + TAIL_SIGMAS * math.sqrt(cT) + TAIL_EXPONENT
    right_rate, left_rate = alpha_beta_gaps(params)
    return reach / left_rate, reach / right_rate


def component_density(x: ArrayLike, sign: Sign, params: MixtureParams) -> Scalar:
    """Density f+/- of one component at log-price x.

    For v = 0 this is the Gamma(cT, lambda+/-) limit, reflected for the - side.

    Raises:
        SingularityError: At x = 0 when the density is unbounded there.
    """
    comp = derive(params)
    xs, scalar = _as_array(x)
    zero = xs == 0

    if params.is_double_gamma:
        if np.any(zero) and comp.cT < 1.0:
            raise SingularityError(f"f{sign.value} is unbounded at x = 0 for cT < 1")
        values = specialfn.gamma_pdf(sign.factor * xs, comp.cT, comp.limit_rate(sign))
        return _unwrap(np.asarray(values), scalar)

    nu = comp.cT - 0.5
    if np.any(zero) and nu <= 0:
        raise SingularityError(f"f{sign.value} is unbounded at x = 0 for cT <= 1/2")

    assert comp.alpha is not None  # noqa: S101
    alpha = comp.alpha
    ax = np.abs(np.where(zero, 1.0, xs))
    log_f = (
        comp.log_gamma(sign)
        + nu * (np.log(ax) - math.log(alpha))
        + comp.beta(sign) * xs
        + specialfn.log_bessel_k(abs(nu), alpha * ax)
    )
    values = np.exp(log_f)
    if np.any(zero):
        # K_nu(z) ~ Gamma(nu) 2^(nu-1) z^-nu as z -> 0
        log_f0 = (
            comp.log_gamma(sign)
            + float(specialfn.log_gamma(nu))
            + (nu - 1.0) * math.log(2.0)
            - 2.0 * nu * math.log(alpha)
        )
        values = np.where(zero, math.exp(log_f0), values)
    return _unwrap(np.asarray(values), scalar)


def double_gamma_density(x: ArrayLike, params: MixtureParams) -> Scalar:
    """Asymmetric double gamma density f0, the v = 0 member of the family.

    Raises:
        ParameterValidationError: If v > 0.
        SingularityError: At x = 0 when cT < 1.
    """
    if not params.is_double_gamma:
        raise ParameterValidationError("double gamma density requires v = 0")
    comp = derive(params)
    xs, scalar = _as_array(x)
    zero = xs == 0

    at_zero = 0.0
    if np.any(zero):
        limits = double_gamma_one_sided_limits(params)
        if not math.isfinite(limits.right):
            raise SingularityError("f0 is unbounded at x = 0 for cT < 1")
        if comp.cT == 1.0:
            logger.debug("f0 at x = 0 for cT = 1", left=limits.left, right=limits.right)
        at_zero = limits.right

    right = comp.weight_plus * np.asarray(
        specialfn.gamma_pdf(np.where(xs > 0, xs, 1.0), comp.cT, comp.lambda_plus)
    )
    left = comp.weight_minus * np.asarray(
        specialfn.gamma_pdf(np.where(xs < 0, -xs, 1.0), comp.cT, comp.lambda_minus)
    )
    values = np.where(xs > 0, right, np.where(xs < 0, left, at_zero))
    return _unwrap(values, scalar)


def mixture_density(x: ArrayLike, params: MixtureParams) -> Scalar:
    """Mixture density f = a/(a+b) f- + b/(a+b) f+ of X_T."""
    if params.is_double_gamma:
        return double_gamma_density(x, params)
    comp = derive(params)
    xs, scalar = _as_array(x)
    values = comp.weight_minus * np.asarray(component_density(xs, Sign.MINUS, params))
    values = values + comp.weight_plus * np.asarray(component_density(xs, Sign.PLUS, params))
    return _unwrap(values, scalar)


def double_gamma_one_sided_limits(params: MixtureParams) -> OneSidedLimits:
    """Left and right limits of f0 at x = 0."""
    comp = derive(params)
    if comp.cT < 1.0:
        return OneSidedLimits(left=math.inf, right=math.inf, continuous=False)
    if comp.cT > 1.0:
        return OneSidedLimits(left=0.0, right=0.0, continuous=True)
    left = comp.weight_minus * comp.lambda_minus
    right = comp.weight_plus * comp.lambda_plus
    return OneSidedLimits(
        left=left, right=right, continuous=math.isclose(left, right, rel_tol=1e-12)
    )


def double_gamma_modes(params: MixtureParams) -> tuple[float, float]:
    """Modes (-(cT-1)/lambda-, (cT-1)/lambda+) of the bimodal double gamma density.

    Raises:
        DomainError: If cT <= 1 (no interior modes).
    """
    comp = derive(params)
    if comp.cT <= 1.0:
        raise DomainError("double gamma density is bimodal only for cT > 1", boundary=1.0)
    return -(comp.cT - 1.0) / comp.lambda_minus, (comp.cT - 1.0) / comp.lambda_plus


def to_std_vg(params: MixtureParams, sign: Sign) -> StdVGParams:
    """Convert one component to the standard (sigma, theta, kappa)-parameterization.

    Raises:
        NotRepresentableError: If v = 0.
    """
    if params.is_double_gamma:
        raise NotRepresentableError(
            "v = 0 has no (sigma, theta, kappa) representation", boundary=0.0
        )
    rate = params.lam + sign.factor * params.mu / 2.0
    v2 = params.v**2
    return StdVGParams(
        sigma_vg=math.sqrt(params.c * v2 / rate),
        theta=params.c * (sign.factor * params.mu - v2 / 2.0) / rate,
        kappa=1.0 / params.c,
        sign=sign,
    )


def psi_std_vg(u: ArrayLike, std: StdVGParams) -> Scalar:
    """Exponent -(1/kappa) log(1 - u theta kappa - sigma^2 kappa u^2 / 2)."""
    us, scalar = _as_array(u)
    inner = 1.0 - us * std.theta * std.kappa - std.sigma_vg**2 * std.kappa * us * us / 2.0
    if np.any(inner <= 0):
        raise DomainError("u outside the domain of the VG exponent")
    return _unwrap(-np.log(inner) / std.kappa, scalar)


def bessel_convergence_factor(alpha: float, u: float, nu: float) -> float:
    """Return sqrt(2 alpha u / pi) e^(alpha u) K_nu(alpha u); tends to 1 as alpha grows."""
    z = alpha * u
    if not z > 0:
        raise DomainError("alpha * u must be strictly positive", boundary=0.0)
    log_k = float(specialfn.log_bessel_k(nu, z))
    return math.exp(0.5 * math.log(2.0 * z / math.pi) + z + log_k)


def density_grid(params: MixtureParams, xs: ArrayLike) -> DensityGrid:
    """Evaluate the mixture density on a grid."""
    grid = np.asarray(xs, dtype=np.float64)
    values = np.asarray(mixture_density(grid, params))
    return DensityGrid(xs=grid.tolist(), values=values.tolist())


def sup_distance_to_limit(params: MixtureParams, xs: ArrayLike) -> float:
    """Return max |f_v(x) - f_0(x)| over the grid."""
    grid = np.asarray(xs, dtype=np.float64)
    f_v = np.asarray(mixture_density(grid, params))
    f_0 = np.asarray(mixture_density(grid, params.with_v(0.0)))
    distance = float(np.max(np.abs(f_v - f_0)))
    logger.debug("Distance to double gamma limit", v=params.v, distance=distance)
    return distance


def sample(params: MixtureParams, n: int, seed: int | None = None) -> NDArray[np.float64]:
    """Draw n log-prices X_T by the mixture construction.

    M ~ Uniform(0, 1) selects the - component when M < p; L ~ Gamma(cT, lambda +/- mu/2)
    and X | L ~ Normal((+/-mu - v^2/2) L, v^2 L) with an independent normal draw.
    """
    if n < 1:
        raise ParameterValidationError(f"sample size must be >= 1, got {n}")
    comp = derive(params)
    rng = np.random.default_rng(seed)

    minus = rng.random(n) < comp.p
    factor = np.where(minus, -1.0, 1.0)
    rate = params.lam + factor * params.mu / 2.0
    time_change = rng.gamma(comp.cT, 1.0 / rate)
    drift = factor * params.mu - params.v**2 / 2.0
    draws = drift * time_change
    if not params.is_double_gamma:
        draws = draws + params.v * np.sqrt(time_change) * rng.standard_normal(n)
    return draws
