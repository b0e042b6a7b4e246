"""Implied total volatility and smile construction."""

from collections.abc import Callable, Sequence
import math

import numpy as np
from scipy import optimize
import structlog

from vgsmile.exceptions import BoundViolationError, BracketError, ConvergenceError
from vgsmile.models.params import Accuracy, MixtureParams
from vgsmile.models.pricing import Quote, TotalVol
from vgsmile.models.smile import AtmCurvature, SmileCurve

from . import pricing, vgmodel

logger = structlog.get_logger(__name__)

VOL_LOWER = 1e-8
VOL_UPPER = 10.0
VOL_XTOL = 1e-10

# Strikes whose out-of-the-money value is below this carry no volatility information.
NEGLIGIBLE_PRICE = 1e-14

# Log-moneyness step for ATM finite differences; Richardson-extrapolated with step / 2.
FD_STEP = 1e-3
FD_XTOL = 1e-13

# Prices within this fraction of intrinsic carry no time value after rounding.
INTRINSIC_RTOL = 1e-12


def _solve(
    pricer: Callable[[float], float], target: float, operation: str, xtol: float
) -> TotalVol:
    def residual(w: float) -> float:
        return pricer(w) - target

    low, high = residual(VOL_LOWER), residual(VOL_UPPER)
    logger.debug("Implied vol bracket", operation=operation, low=low, high=high)
    if low * high > 0:
        raise BracketError(
            f"No sign change for {operation} on [{VOL_LOWER}, {VOL_UPPER}]",
            lower=VOL_LOWER,
            upper=VOL_UPPER,
            operation=operation,
        )
    if low == 0:
        return TotalVol(w=VOL_LOWER)

    root, result = optimize.brentq(
        residual, VOL_LOWER, VOL_UPPER, xtol=xtol, maxiter=500, full_output=True
    )
    if not result.converged:
        raise ConvergenceError(
            f"Brent iteration for {operation} did not converge",
            partial_estimate=root,
            operation=operation,
        )
    return TotalVol(w=root)


def implied_vol(
    call_price: float, strike: float, S0: float = 1.0, xtol: float = VOL_XTOL  # noqa: N803
) -> TotalVol:
    """Total volatility w with bs_call(strike, w, S0) = call_price.

    Strikes below S0 are inverted through the put, which is the better conditioned leg.

    Raises:
        BoundViolationError: If the price is outside (max(S0 - K, 0), S0).
        BracketError: If no root is bracketed on [1e-8, 10].
    """
    intrinsic = max(S0 - strike, 0.0)
    if not call_price > intrinsic * (1.0 + INTRINSIC_RTOL):
        raise BoundViolationError(
            f"call price {call_price} is not above the lower bound {intrinsic}", bound="lower"
        )
    if not call_price < S0:
        raise BoundViolationError(
            f"call price {call_price} is not below the upper bound {S0}", bound="upper"
        )
    if strike < S0:
        return implied_vol_put(call_price - (S0 - strike), strike, S0, xtol=xtol)
    return _solve(
        lambda w: pricing.bs_call(strike, w, S0), call_price, "implied_vol", xtol
    )


def implied_vol_put(
    put_price: float, strike: float, S0: float = 1.0, xtol: float = VOL_XTOL  # noqa: N803
) -> TotalVol:
    """Total volatility w with bs_put(strike, w, S0) = put_price.

    Raises:
        BoundViolationError: If the price is outside (max(K - S0, 0), K).
        BracketError: If no root is bracketed on [1e-8, 10].
    """
    intrinsic = max(strike - S0, 0.0)
    if not put_price > intrinsic * (1.0 + INTRINSIC_RTOL):
        raise BoundViolationError(
            f"put price {put_price} is not above the lower bound {intrinsic}", bound="lower"
        )
    if not put_price < strike:
        raise BoundViolationError(
            f"put price {put_price} is not below the upper bound {strike}", bound="upper"
        )
    if strike > S0:
        return implied_vol(put_price + (S0 - strike), strike, S0, xtol=xtol)
    return _solve(lambda w: pricing.bs_put(strike, w, S0), put_price, "implied_vol_put", xtol)


def implied_vol_from_quote(quote: Quote, xtol: float = VOL_XTOL) -> TotalVol:
    """Invert the out-of-the-money leg of a quote."""
    if quote.strike < quote.S0:
        return implied_vol_put(quote.put, quote.strike, quote.S0, xtol=xtol)
    return implied_vol(quote.call, quote.strike, quote.S0, xtol=xtol)


def strike_grid(S0: float, window: float, points: int) -> list[float]:  # noqa: N803
    """Log-spaced strikes on [S0 e^-window, S0 e^window]; mirrored pairs multiply to S0^2."""
    return (S0 * np.exp(np.linspace(-window, window, points))).tolist()


def smile(
    params: MixtureParams,
    strikes: Sequence[float] | None = None,
    accuracy: Accuracy | None = None,
    xtol: float = VOL_XTOL,
) -> SmileCurve:
    """Implied total volatility of the mixture over a strike grid.

    Strikes with negligible out-of-the-money value are reported as gaps.
    """
    if strikes is None:
        from vgsmile.config import settings

        strikes = strike_grid(params.S0, settings.log_moneyness_window, settings.grid_points)

    kept_strikes, vols, gaps = [], [], []
    for quote in pricing.price_curve(strikes, params, accuracy):
        if quote.out_of_the_money < NEGLIGIBLE_PRICE * params.S0:
            gaps.append(quote.strike)
            continue
        kept_strikes.append(quote.strike)
        vols.append(implied_vol_from_quote(quote, xtol=xtol).w)

    if gaps:
        logger.warning(
            "Strikes excluded as negligible deep wing",
            count=len(gaps),
            lowest=min(gaps),
            highest=max(gaps),
        )
    logger.debug("Smile built", points=len(vols), v=params.v)
    return SmileCurve(strikes=kept_strikes, vols=vols, S0=params.S0, params=params, gaps=gaps)


def _log_moneyness_derivatives(
    params: MixtureParams, step: float, accuracy: Accuracy | None
) -> tuple[float, float, float]:
    """s(0), s'(0), s''(0) for s(k) = sigma(S0 e^k), extrapolated from steps h and h / 2."""
    S0 = params.S0  # noqa: N806
    half = step / 2.0
    strikes = [S0 * math.exp(k) for k in (-step, -half, 0.0, half, step)]
    curve = smile(params, strikes, accuracy, xtol=FD_XTOL)
    if len(curve) != len(strikes):
        raise BoundViolationError("ATM option value is negligible", bound="lower")
    far_low, low, mid, high, far_high = curve.vols

    def richardson(coarse: float, fine: float) -> float:
        return (4.0 * fine - coarse) / 3.0

    first = richardson((far_high - far_low) / (2.0 * step), (high - low) / (2.0 * half))
    second = richardson(
        (far_high - 2.0 * mid + far_low) / step**2, (high - 2.0 * mid + low) / half**2
    )
    return mid, first, second


def atm_slope(
    params: MixtureParams, step: float = FD_STEP, accuracy: Accuracy | None = None
) -> float:
    """Central-difference estimate of d sigma / dK at K = S0."""
    _, first, _ = _log_moneyness_derivatives(params, step, accuracy)
    return first / params.S0


def atm_curvature(
    params: MixtureParams, step: float = FD_STEP, accuracy: Accuracy | None = None
) -> AtmCurvature:
    """Second strike-derivative of the smile at the money, by finite differences and in closed form.

    With sigma'(S0) = 0 differentiating C(K) = C_BS(K, sigma(K)) twice gives
    sigma''(S0) = (C''(S0) - d^2 C_BS / dK^2) / vega, and C''(S0) = f(0) / S0.
    """
    S0 = params.S0  # noqa: N806
    mid, first, second = _log_moneyness_derivatives(params, step, accuracy)
    # sigma'' = (s'' - s') / S0^2
    finite_difference = (second - first) / S0**2

    density_at_zero = float(vgmodel.mixture_density(0.0, params))
    gamma = pricing.bs_gamma_atm(mid, S0)
    vega = pricing.bs_vega(S0, mid, S0)
    formula = (density_at_zero / S0 - gamma) / vega

    logger.debug(
        "ATM curvature",
        finite_difference=finite_difference,
        formula=formula,
        atm_vol=mid,
    )
    return AtmCurvature(
        finite_difference=finite_difference,
        formula=formula,
        atm_vol=mid,
        density_at_zero=density_at_zero,
        bs_gamma=gamma,
        vega=vega,
    )
