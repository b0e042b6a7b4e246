"""Smile handlers for CLI commands."""

import math

from vgsmile.cli_instance import arg, cli
from vgsmile.core import implied
from vgsmile.models.base import Table
from vgsmile.models.config import RunConfig

from .base import BaseHandler

handler = BaseHandler()


@cli.command(
    name="smile",
    title="Implied Volatility Smile",
    description=(
        "Implied total volatility over the strike grid. Columns: K, sigma "
        "(and sigma_annual = sigma / sqrt(T) with --annualize)."
    ),
    arguments=[
        arg("--annualize", action="store_true", help="Add a per-year volatility column"),
    ],
)
def cmd_smile(config: RunConfig, annualize: bool = False) -> Table:
    """Compute the implied-volatility curve."""
    params = config.params
    strikes = implied.strike_grid(params.S0, config.log_moneyness_window, config.grid_points)
    curve = implied.smile(params, strikes, config.accuracy)

    columns = ["K", "sigma"]
    rows = [[k, w] for k, w in zip(curve.strikes, curve.vols, strict=True)]
    if annualize:
        columns.append("sigma_annual")
        rows = [[k, w, w / math.sqrt(params.T)] for k, w in rows]

    handler.logger.info("Smile built", points=len(curve), gaps=len(curve.gaps))
    return handler.format_table("smile", columns, rows, config=config, gaps=curve.gaps)
