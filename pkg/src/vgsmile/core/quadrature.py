"""Adaptive Gauss-Kronrod quadrature with the package's accuracy and error policy."""

from collections.abc import Callable, Sequence
import warnings

from scipy import integrate
import structlog

from vgsmile.config import settings
from vgsmile.exceptions import ConvergenceError
from vgsmile.models.params import Accuracy

logger = structlog.get_logger(__name__)

# QUADPACK flags roundoff well before the requested 1e-12; estimates within this
# factor of the request are accepted.
ACCEPTANCE_FACTOR = 1e4


def integrate_adaptive(
    func: Callable[[float], float],
    lower: float,
    upper: float,
    accuracy: Accuracy,
    operation: str,
    points: Sequence[float] | None = None,
) -> float:
    """Integrate ``func`` over ``[lower, upper]`` with QUADPACK.

    Raises:
        ConvergenceError: If the error estimate exceeds the accepted tolerance.
    """
    if lower == upper:
        return 0.0

    kwargs: dict = {
        "epsabs": accuracy.abs_tol,
        "epsrel": accuracy.rel_tol,
        "limit": max(accuracy.max_iter, settings.quad_limit),
        "full_output": 1,
    }
    if points is not None:
        inner = [x for x in points if lower < x < upper]
        if inner:
            kwargs["points"] = inner

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        result = integrate.quad(func, lower, upper, **kwargs)

    value, error = float(result[0]), float(result[1])
    flagged = len(result) > 3
    accepted = ACCEPTANCE_FACTOR * max(accuracy.abs_tol, accuracy.rel_tol * abs(value))

    logger.debug(
        "Quadrature finished",
        operation=operation,
        lower=lower,
        upper=upper,
        value=value,
        error=error,
        flagged=flagged,
    )

    if flagged and error > accepted:
        raise ConvergenceError(
            f"Quadrature for {operation} did not converge on [{lower}, {upper}]",
            partial_estimate=value,
            error_estimate=error,
            operation=operation,
        )
    return value
