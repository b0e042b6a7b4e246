"""Shape classification handlers for CLI commands."""

from vgsmile.cli_instance import arg, cli
from vgsmile.core import shape
from vgsmile.models.base import Table
from vgsmile.models.config import RunConfig

from .base import BaseHandler

handler = BaseHandler()


@cli.command(
    name="classify",
    title="Classify Smile Shape",
    description=(
        "Classify the smile as W, W+ or NOT_W with the sufficient-condition checks. "
        "Columns: classification, sigma_star, n_vol, sign_sequence, geometric_symmetry, "
        "r_star, dip_at_zero, log_window, widenings."
    ),
)
def cmd_classify(config: RunConfig) -> Table:
    """Classify the smile of the configured model."""
    report = shape.classify_params(
        config.params,
        config.log_moneyness_window,
        config.grid_points,
        accuracy=config.accuracy,
    )
    conditions = report.conditions
    row = [
        report.classification.value,
        report.sigma_star,
        report.n_vol,
        report.sign_sequence,
        conditions.geometric_symmetry.passed if conditions else None,
        conditions.semi_heavy_tails if conditions else None,
        conditions.dip_at_zero.passed if conditions else None,
        report.log_window,
        report.widenings,
    ]
    return handler.format_table(
        "classification",
        [
            "classification",
            "sigma_star",
            "n_vol",
            "sign_sequence",
            "geometric_symmetry",
            "r_star",
            "dip_at_zero",
            "log_window",
            "widenings",
        ],
        [row],
        config=config,
        report=report.model_dump(mode="json"),
    )


@cli.command(
    name="boundary",
    title="Empirical Shape Boundary",
    description=(
        "Bisect over v for the largest component volatility still classified W "
        "(numerical estimate). Columns: v_w, v_not_w, steps, found."
    ),
    arguments=[
        arg("--v-low", type=float, default=0.0, help="Lower end, must be classified W"),
        arg("--v-high", type=float, default=0.1, help="Upper end of the search"),
        arg("--tolerance", type=float, default=1e-3, help="Bracket width to stop at"),
    ],
)
def cmd_boundary(
    config: RunConfig, v_low: float = 0.0, v_high: float = 0.1, tolerance: float = 1e-3
) -> Table:
    """Locate the empirical W-shape boundary in v."""
    report = shape.empirical_shape_boundary(
        config.params,
        v_low,
        v_high,
        tolerance=tolerance,
        window=config.log_moneyness_window,
        points=config.grid_points,
    )
    return handler.format_table(
        "boundary",
        ["v_w", "v_not_w", "steps", "found"],
        [[report.v_w, report.v_not_w, report.steps, report.found]],
        config=config,
        numerical=report.numerical,
        tolerance=tolerance,
    )
