"""Figure-data handlers for CLI commands."""

import numpy as np

from vgsmile.cli_instance import cli
from vgsmile.core import implied, pricing, shape
from vgsmile.models.base import Table
from vgsmile.models.config import RunConfig

from .base import BaseHandler
from .density import density_or_nan, x_grid

handler = BaseHandler()

FIGURE_V = (0.0, 0.01, 0.015, 0.02)


@cli.command(
    name="figures",
    title="Figure Data",
    description=(
        "Write three tables into the --out directory: fig1_densities (x, f_v=... for "
        "v in 0, 0.01, 0.015, 0.02), fig2_double_gamma (x, f_0, phi, log_abs_diff at the "
        "classified sigma*), fig3_smiles (K, sigma_v=... per v, classification in metadata)."
    ),
)
def cmd_figures(config: RunConfig) -> list[Table]:
    """Emit the data behind the density, crossing and smile figures."""
    base = config.params
    xs = x_grid(-0.2, 0.2, 401)

    densities = np.column_stack([xs] + [density_or_nan(base.with_v(v), xs) for v in FIGURE_V])
    fig1 = handler.format_table(
        "fig1_densities",
        ["x"] + [f"f_v={v}" for v in FIGURE_V],
        densities.tolist(),
        config=config,
    )

    strikes = implied.strike_grid(base.S0, config.log_moneyness_window, config.grid_points)
    vols: dict[float, dict[float, float]] = {}
    classifications: dict[str, str] = {}
    sigma_star = None
    for v in FIGURE_V:
        params = base.with_v(v)
        curve = implied.smile(params, strikes, config.accuracy)
        report = shape.classify(curve, params, with_conditions=False, accuracy=config.accuracy)
        vols[v] = dict(zip(curve.strikes, curve.vols, strict=True))
        classifications[str(v)] = report.classification.value
        if v == 0.0:
            sigma_star = report.sigma_star or implied.implied_vol_from_quote(
                pricing.price(params.S0, params, config.accuracy)
            ).w

    fig3 = handler.format_table(
        "fig3_smiles",
        ["K"] + [f"sigma_v={v}" for v in FIGURE_V],
        [[k] + [vols[v].get(k, float("nan")) for v in FIGURE_V] for k in strikes],
        config=config,
        classification=classifications,
    )

    limit = base.with_v(0.0)
    assert sigma_star is not None  # noqa: S101
    crossings = shape.count_density_crossings(limit, sigma_star)
    phi = np.asarray(pricing.bs_density(xs, sigma_star))
    log_diff = np.full_like(xs, np.nan)
    finite = np.ones_like(xs, dtype=bool) if shape.density_is_finite_at_zero(limit) else xs != 0
    log_diff[finite] = shape.log_abs_difference(limit, sigma_star, xs[finite])
    fig2 = handler.format_table(
        "fig2_double_gamma",
        ["x", "f_0", "phi", "log_abs_diff"],
        np.column_stack(
            (
                xs,
                density_or_nan(limit, xs),
                phi,
                log_diff,
            )
        ).tolist(),
        config=config,
        sigma_star=sigma_star,
        n_pdf=crossings.n_pdf,
        crossing_xs=crossings.crossing_xs,
    )

    handler.logger.info("Figure data built", classification=classifications)
    return [fig1, fig2, fig3]
