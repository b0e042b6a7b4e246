"""Real-valued special functions: Bessel K, log-gamma, Gamma CDF, normal CDF.

Values come from ``scipy.special`` (AMOS for Bessel functions, Cephes for the
incomplete gamma and normal functions) behind the domain checks and error types of
this package. Half-integer Bessel orders use the closed-form finite sum, and the
integral representation of K_nu is available as an independent oracle.

All functions are pure and accept scalars or numpy arrays.
"""

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special
import structlog

from vgsmile.exceptions import ConvergenceError, DomainError
from vgsmile.models.params import Accuracy

from .quadrature import integrate_adaptive

logger = structlog.get_logger(__name__)

# Highest n for which K_{n+1/2} is summed in closed form.
MAX_HALF_INTEGER_TERMS = 40

# The scaled integrand exp(-z (cosh t - 1)) cosh(nu t) is below exp(-TAIL_EXPONENT)
# beyond the cutoff.
TAIL_EXPONENT = 60.0

LOG_SQRT_PI_OVER_2 = 0.5 * math.log(math.pi / 2.0)


def _unwrap(values: NDArray[np.float64], scalar: bool) -> float | NDArray[np.float64]:
    return float(values) if scalar else values


def _check_order(nu: float) -> None:
    if not math.isfinite(nu) or nu < 0:
        raise DomainError(f"Bessel order must be finite and >= 0, got {nu}", boundary=0.0)


def _check_positive(z: NDArray[np.float64], name: str) -> None:
    if np.any(~(z > 0)):
        raise DomainError(f"{name} must be strictly positive", boundary=0.0)


def half_integer_index(nu: float) -> int | None:
    """Return n if nu = n + 1/2 with n small enough for the closed form, else None."""
    n = nu - 0.5
    if n >= 0 and n == math.floor(n) and n <= MAX_HALF_INTEGER_TERMS:
        return int(n)
    return None


def _log_half_integer_sum(n: int, z: NDArray[np.float64]) -> NDArray[np.float64]:
    # sum_{k=0}^{n} (n+k)! / (k! (n-k)!) (2z)^{-k}
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(n):
        term = term * (n + k + 1) * (n - k) / ((k + 1) * 2.0 * z)
        total = total + term
    return np.log(total)


def log_bessel_k(nu: float, z: ArrayLike) -> float | NDArray[np.float64]:
    """Return log K_nu(z) without underflow for large z.

    Raises:
        DomainError: If nu < 0 or any z <= 0.
    """
    _check_order(nu)
    scalar = np.ndim(z) == 0
    zs = np.asarray(z, dtype=np.float64)
    _check_positive(zs, "Bessel argument z")

    n = half_integer_index(nu)
    if n is not None:
        out = LOG_SQRT_PI_OVER_2 - 0.5 * np.log(zs) - zs + _log_half_integer_sum(n, zs)
    else:
        with np.errstate(divide="ignore", over="ignore"):
            out = np.log(special.kve(nu, zs)) - zs

    if np.any(~np.isfinite(out)):
        raise ConvergenceError(
            f"K_{nu} overflowed for some arguments",
            partial_estimate=None,
            operation="log_bessel_k",
        )
    return _unwrap(out, scalar)


def bessel_k(nu: float, z: ArrayLike) -> float | NDArray[np.float64]:
    """Return the modified Bessel function of the second kind K_nu(z), z > 0.

    Large z is handled through the exponentially scaled function, so the result
    follows e^{-z} sqrt(pi / (2z)) without intermediate overflow; it underflows to
    0.0 only where K_nu itself is below the smallest double.

    Raises:
        DomainError: If nu < 0 or any z <= 0.
        ConvergenceError: If the value overflows (tiny z with large order).
    """
    log_value = log_bessel_k(nu, z)
    return np.exp(log_value) if isinstance(log_value, np.ndarray) else math.exp(log_value)


def bessel_k_half_integer(n: int, z: float) -> float:
    """Return K_{n+1/2}(z) from its closed-form finite sum."""
    if n < 0:
        raise DomainError(f"half-integer index must be >= 0, got {n}", boundary=0.0)
    if not z > 0:
        raise DomainError("Bessel argument z must be strictly positive", boundary=0.0)
    term, total = 1.0, 1.0
    for k in range(n):
        term *= (n + k + 1) * (n - k) / ((k + 1) * 2.0 * z)
        total += term
    return math.sqrt(math.pi / (2.0 * z)) * math.exp(-z) * total


def bessel_k_integral(nu: float, z: float, accuracy: Accuracy | None = None) -> float:
    """Return K_nu(z) from the integral of exp(-z cosh t) cosh(nu t) over t > 0.

    Raises:
        DomainError: If nu < 0 or z <= 0.
        ConvergenceError: If the quadrature misses the accuracy target.
    """
    _check_order(nu)
    if not z > 0:
        raise DomainError("Bessel argument z must be strictly positive", boundary=0.0)
    accuracy = accuracy or Accuracy.from_settings()

    cutoff = math.acosh(1.0 + TAIL_EXPONENT / z)
    while z * (math.cosh(cutoff) - 1.0) - nu * cutoff < TAIL_EXPONENT:
        cutoff *= 1.5

    def integrand(t: float) -> float:
        return math.exp(-z * (math.cosh(t) - 1.0)) * math.cosh(nu * t)

    scaled = integrate_adaptive(integrand, 0.0, cutoff, accuracy, operation="bessel_k_integral")
    return scaled * math.exp(-z)


def log_gamma(x: ArrayLike) -> float | NDArray[np.float64]:
    """Return log Gamma(x) for x > 0.

    Raises:
        DomainError: If any x <= 0.
    """
    scalar = np.ndim(x) == 0
    xs = np.asarray(x, dtype=np.float64)
    _check_positive(xs, "log_gamma argument")
    return _unwrap(special.gammaln(xs), scalar)


def _check_gamma_params(shape: float, rate: float) -> None:
    if not shape > 0:
        raise DomainError(f"Gamma shape must be > 0, got {shape}", boundary=0.0)
    if not rate > 0:
        raise DomainError(f"Gamma rate must be > 0, got {rate}", boundary=0.0)


def gamma_cdf(x: ArrayLike, shape: float, rate: float) -> float | NDArray[np.float64]:
    """Return P(G <= x) for G ~ Gamma(shape, rate), extended by zero to x <= 0.

    Raises:
        DomainError: If shape <= 0 or rate <= 0.
    """
    _check_gamma_params(shape, rate)
    scalar = np.ndim(x) == 0
    xs = np.asarray(x, dtype=np.float64)
    out = np.where(xs > 0, special.gammainc(shape, rate * np.maximum(xs, 0.0)), 0.0)
    return _unwrap(out, scalar)


def gamma_sf(x: ArrayLike, shape: float, rate: float) -> float | NDArray[np.float64]:
    """Return P(G > x), computed directly so that small tails keep their digits."""
    _check_gamma_params(shape, rate)
    scalar = np.ndim(x) == 0
    xs = np.asarray(x, dtype=np.float64)
    out = np.where(xs > 0, special.gammaincc(shape, rate * np.maximum(xs, 0.0)), 1.0)
    return _unwrap(out, scalar)


def gamma_pdf(x: ArrayLike, shape: float, rate: float) -> float | NDArray[np.float64]:
    """Return the Gamma(shape, rate) density, zero for x < 0.

    At x = 0 the density is its right limit: +inf for shape < 1, rate for
    shape = 1 and 0 for shape > 1.
    """
    _check_gamma_params(shape, rate)
    scalar = np.ndim(x) == 0
    xs = np.asarray(x, dtype=np.float64)
    positive = xs > 0
    safe = np.where(positive, xs, 1.0)
    log_density = (
        shape * math.log(rate) - special.gammaln(shape) + (shape - 1.0) * np.log(safe) - rate * safe
    )
    if shape < 1.0:
        at_zero = math.inf
    elif shape == 1.0:
        at_zero = rate
    else:
        at_zero = 0.0
    out = np.where(positive, np.exp(log_density), np.where(xs == 0, at_zero, 0.0))
    return _unwrap(out, scalar)


def norm_cdf(x: ArrayLike) -> float | NDArray[np.float64]:
    """Return the standard normal CDF."""
    scalar = np.ndim(x) == 0
    return _unwrap(special.ndtr(np.asarray(x, dtype=np.float64)), scalar)


def norm_pdf(x: ArrayLike) -> float | NDArray[np.float64]:
    """Return the standard normal density."""
    scalar = np.ndim(x) == 0
    xs = np.asarray(x, dtype=np.float64)
    return _unwrap(np.exp(-0.5 * xs * xs) / math.sqrt(2.0 * math.pi), scalar)
