"""Pricing handlers for CLI commands."""

from vgsmile.cli_instance import arg, cli
from vgsmile.core import implied, pricing
from vgsmile.models.base import Table
from vgsmile.models.config import RunConfig

from .base import BaseHandler

handler = BaseHandler()


@cli.command(
    name="price",
    title="Price Options",
    description="Call and put prices of the mixture model. Columns: K, call, put.",
    arguments=[
        arg(
            "--strikes",
            type=float,
            nargs="+",
            help="Strikes to price (default: the log-spaced smile grid)",
        ),
    ],
)
def cmd_price(config: RunConfig, strikes: list[float] | None = None) -> Table:
    """Price a list of strikes."""
    params = config.params
    grid = strikes or implied.strike_grid(
        params.S0, config.log_moneyness_window, config.grid_points
    )
    quotes = pricing.price_curve(grid, params, config.accuracy)
    handler.logger.info("Priced strikes", count=len(quotes))
    return handler.format_table(
        "prices",
        ["K", "call", "put"],
        [[q.strike, q.call, q.put] for q in quotes],
        config=config,
    )
