"""Zero-rate option pricing: Black-Scholes reference and the mixture closed form.

Mixture prices follow from the distribution function Q of X_T and the share-measure
identity e^x f(x) = f(-x):

    C(K) = S0 Q(-k) - K (1 - Q(k)),    P(K) = K Q(k) - S0 (1 - Q(-k)),    k = log(K/S0).

Both legs only need left tails Q(x), x <= 0, and right tails 1 - Q(x), x >= 0, so the
out-of-the-money leg is priced from tails and the other follows by parity.
"""

from collections.abc import Sequence
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
import structlog

from vgsmile.exceptions import ParameterValidationError
from vgsmile.models.params import Accuracy, MixtureParams, Sign
from vgsmile.models.pricing import Quote, TotalVol

from . import specialfn, vgmodel
from .quadrature import integrate_adaptive

logger = structlog.get_logger(__name__)

Vol = TotalVol | float


def _total_vol(w: Vol) -> float:
    value = w.w if isinstance(w, TotalVol) else float(w)
    if not value > 0:
        raise ParameterValidationError(f"total volatility must be > 0, got {value}")
    return value


def _check_strike(strike: float, S0: float) -> None:  # noqa: N803
    if not strike > 0:
        raise ParameterValidationError(f"strike must be > 0, got {strike}")
    if not S0 > 0:
        raise ParameterValidationError(f"spot must be > 0, got {S0}")


def _d1_d2(strike: float, w: float, S0: float) -> tuple[float, float]:  # noqa: N803
    d1 = (math.log(S0 / strike) + 0.5 * w * w) / w
    return d1, d1 - w


def bs_call(strike: float, w: Vol, S0: float = 1.0) -> float:  # noqa: N803
    """Black-Scholes call with total volatility w and zero rates."""
    _check_strike(strike, S0)
    vol = _total_vol(w)
    d1, d2 = _d1_d2(strike, vol, S0)
    return max(S0 * float(specialfn.norm_cdf(d1)) - strike * float(specialfn.norm_cdf(d2)), 0.0)


def bs_put(strike: float, w: Vol, S0: float = 1.0) -> float:  # noqa: N803
    """Black-Scholes put with total volatility w and zero rates."""
    _check_strike(strike, S0)
    vol = _total_vol(w)
    d1, d2 = _d1_d2(strike, vol, S0)
    return max(
        strike * float(specialfn.norm_cdf(-d2)) - S0 * float(specialfn.norm_cdf(-d1)), 0.0
    )


def bs_vega(strike: float, w: Vol, S0: float = 1.0) -> float:  # noqa: N803
    """Sensitivity dC/dw = S0 phi(d1) of the call to total volatility."""
    _check_strike(strike, S0)
    vol = _total_vol(w)
    d1, _ = _d1_d2(strike, vol, S0)
    return S0 * float(specialfn.norm_pdf(d1))


def bs_density(x: ArrayLike, w: Vol) -> float | NDArray[np.float64]:
    """Black-Scholes log-price density: normal with mean -w^2/2 and variance w^2."""
    vol = _total_vol(w)
    xs = np.asarray(x, dtype=np.float64)
    values = np.asarray(specialfn.norm_pdf((xs + 0.5 * vol * vol) / vol)) / vol
    return float(values) if np.ndim(x) == 0 else values


def bs_gamma_atm(w: Vol, S0: float = 1.0) -> float:  # noqa: N803
    """Strike gamma d^2 C_BS / dK^2 at K = S0, i.e. exp(-w^2/8) / (sqrt(2 pi) w S0)."""
    return float(bs_density(0.0, w)) / S0


class _TailIntegrator:
    """Left tails Q(x), x <= 0, and right tails 1 - Q(x), x >= 0, of the mixture."""

    def __init__(self, params: MixtureParams, accuracy: Accuracy) -> None:
        self.params = params
        self.accuracy = accuracy
        self.comp = vgmodel.derive(params)
        self.left_cut, self.right_cut = vgmodel.tail_cutoffs(params)
        right_rate, left_rate = vgmodel.alpha_beta_gaps(params)
        spread = math.sqrt(self.comp.cT)
        self.left_breaks = [-spread / left_rate * s for s in (4.0, 1.0, 0.1)]
        self.right_breaks = [spread / right_rate * s for s in (0.1, 1.0, 4.0)]

    def density(self, x: float) -> float:
        return float(vgmodel.mixture_density(x, self.params))

    def left(self, x: float) -> float:
        if self.params.is_double_gamma:
            return self.comp.weight_minus * float(
                specialfn.gamma_sf(-x, self.comp.cT, self.comp.lambda_minus)
            )
        lower = -self.left_cut
        if x <= lower:
            return 0.0
        return self.piece(lower, x, self.left_breaks)

    def right(self, x: float) -> float:
        if self.params.is_double_gamma:
            return self.comp.weight_plus * float(
                specialfn.gamma_sf(x, self.comp.cT, self.comp.lambda_plus)
            )
        upper = self.right_cut
        if x >= upper:
            return 0.0
        return self.piece(x, upper, self.right_breaks)

    def piece(self, lower: float, upper: float, breaks: Sequence[float] | None = None) -> float:
        return integrate_adaptive(
            self.density, lower, upper, self.accuracy, operation="mixture_tail", points=breaks
        )

    def cumulative_left(self, xs: Sequence[float]) -> dict[float, float]:
        """Q at ascending points xs <= 0 by summing quadratures over consecutive gaps."""
        if self.params.is_double_gamma or not xs:
            return {x: self.left(x) for x in xs}
        out = {xs[0]: self.left(xs[0])}
        for prev, cur in zip(xs, xs[1:], strict=False):
            out[cur] = out[prev] + self.piece(max(prev, -self.left_cut), max(cur, -self.left_cut))
        return out

    def cumulative_right(self, xs: Sequence[float]) -> dict[float, float]:
        """1 - Q at descending points xs >= 0."""
        if self.params.is_double_gamma or not xs:
            return {x: self.right(x) for x in xs}
        out = {xs[0]: self.right(xs[0])}
        for prev, cur in zip(xs, xs[1:], strict=False):
            out[cur] = out[prev] + self.piece(min(cur, self.right_cut), min(prev, self.right_cut))
        return out


def _quote(
    strike: float, params: MixtureParams, left_tail: float, right_tail: float
) -> Quote:
    """Assemble a quote from Q(-|k|) and 1 - Q(|k|)."""
    S0 = params.S0  # noqa: N806
    if strike >= S0:
        call = max(S0 * left_tail - strike * right_tail, 0.0)
        put = call - (S0 - strike)
    else:
        put = max(strike * left_tail - S0 * right_tail, 0.0)
        call = put + (S0 - strike)
    return Quote(strike=strike, call=call, put=put, S0=S0)


def vg_cdf(
    x: float, sign: Sign, params: MixtureParams, accuracy: Accuracy | None = None
) -> float:
    """Distribution function of one component by quadrature of its density.

    v = 0 gives the Gamma limit: Gamma(cT, lambda+) on the right, reflected on the left.
    """
    comp = vgmodel.derive(params)
    if params.is_double_gamma:
        if sign is Sign.PLUS:
            return float(specialfn.gamma_cdf(x, comp.cT, comp.lambda_plus))
        return float(specialfn.gamma_sf(-x, comp.cT, comp.lambda_minus))

    accuracy = accuracy or Accuracy.from_settings()
    left_cut, right_cut = vgmodel.tail_cutoffs(params)

    def density(y: float) -> float:
        return float(vgmodel.component_density(y, sign, params))

    if x <= 0:
        if x <= -left_cut:
            return 0.0
        return integrate_adaptive(density, -left_cut, x, accuracy, operation="vg_cdf")
    if x >= right_cut:
        return 1.0
    return 1.0 - integrate_adaptive(density, x, right_cut, accuracy, operation="vg_cdf")


def q_function(x: float, params: MixtureParams, accuracy: Accuracy | None = None) -> float:
    """Mixture distribution function Q(x) = P(X_T <= x)."""
    tails = _TailIntegrator(params, accuracy or Accuracy.from_settings())
    return tails.left(x) if x <= 0 else 1.0 - tails.right(x)


def q_bar(x: float, params: MixtureParams, accuracy: Accuracy | None = None) -> float:
    """Survival function 1 - Q(x), taken from the right tail directly for x >= 0."""
    tails = _TailIntegrator(params, accuracy or Accuracy.from_settings())
    return tails.right(x) if x >= 0 else 1.0 - tails.left(x)


def price(strike: float, params: MixtureParams, accuracy: Accuracy | None = None) -> Quote:
    """Call and put at one strike in the mixture model."""
    _check_strike(strike, params.S0)
    tails = _TailIntegrator(params, accuracy or Accuracy.from_settings())
    k = abs(math.log(strike / params.S0))
    return _quote(strike, params, tails.left(-k), tails.right(k))


def price_curve(
    strikes: Sequence[float], params: MixtureParams, accuracy: Accuracy | None = None
) -> list[Quote]:
    """Price a strike grid, sharing tail integrals between neighbouring strikes."""
    for strike in strikes:
        _check_strike(strike, params.S0)
    tails = _TailIntegrator(params, accuracy or Accuracy.from_settings())

    distances = sorted({abs(math.log(strike / params.S0)) for strike in strikes})
    left = tails.cumulative_left(sorted(-d for d in distances))
    right = tails.cumulative_right(sorted(distances, reverse=True))

    quotes = []
    for strike in strikes:
        k = abs(math.log(strike / params.S0))
        quotes.append(_quote(strike, params, left[-k], right[k]))
    logger.debug("Priced strike grid", strikes=len(quotes), v=params.v)
    return quotes


def price_by_quadrature(
    strike: float, params: MixtureParams, accuracy: Accuracy | None = None
) -> float:
    """Call price as the integral of (s - K) g(s) over s > K, g(s) = f(log(s/S0)) / s."""
    _check_strike(strike, params.S0)
    tails = _TailIntegrator(params, accuracy or Accuracy.from_settings())
    S0 = params.S0  # noqa: N806
    upper = S0 * math.exp(tails.right_cut)
    if strike >= upper:
        return 0.0

    def payoff_density(s: float) -> float:
        return (s - strike) * float(vgmodel.mixture_density(math.log(s / S0), params)) / s

    value = 0.0
    if strike < S0:
        value += integrate_adaptive(
            payoff_density,
            strike,
            S0,
            tails.accuracy,
            operation="price_by_quadrature",
            points=[S0 * math.exp(x) for x in tails.left_breaks],
        )
    value += integrate_adaptive(
        payoff_density,
        max(strike, S0),
        upper,
        tails.accuracy,
        operation="price_by_quadrature",
        points=[S0 * math.exp(x) for x in tails.right_breaks],
    )
    return value
