"""Density and convergence handlers for CLI commands."""

import numpy as np
from numpy.typing import NDArray

from vgsmile.cli_instance import arg, cli
from vgsmile.core import shape, vgmodel
from vgsmile.models.base import Table
from vgsmile.models.config import RunConfig
from vgsmile.models.params import MixtureParams

from .base import BaseHandler

handler = BaseHandler()

DEFAULT_V_LIST = [0.02, 0.015, 0.01, 0.005]


def x_grid(x_min: float, x_max: float, points: int) -> NDArray[np.float64]:
    """Evenly spaced grid with the point nearest 0 snapped to exactly 0."""
    xs = np.linspace(x_min, x_max, points)
    xs[np.abs(xs) < 1e-12 * (x_max - x_min)] = 0.0
    return xs


def density_or_nan(params: MixtureParams, xs: NDArray[np.float64]) -> NDArray[np.float64]:
    """Density on a grid with NaN at an unbounded x = 0."""
    finite = np.ones_like(xs, dtype=bool) if shape.density_is_finite_at_zero(params) else xs != 0
    values = np.full_like(xs, np.nan)
    values[finite] = vgmodel.mixture_density(xs[finite], params)
    return values


def empirical_density(
    params: MixtureParams, xs: NDArray[np.float64], samples: int, seed: int
) -> NDArray[np.float64]:
    """Histogram density of sampler draws on cells centred at the grid points."""
    draws = vgmodel.sample(params, samples, seed)
    mids = (xs[:-1] + xs[1:]) / 2.0
    edges = np.concatenate(([2 * xs[0] - mids[0]], mids, [2 * xs[-1] - mids[-1]]))
    counts, _ = np.histogram(draws, bins=edges)
    return counts / (samples * np.diff(edges))


@cli.command(
    name="density",
    title="Log-Price Density",
    description=(
        "Mixture density f_v and its double gamma limit f_0 on an x grid. "
        "Columns: x, f_v, f_0 (and f_mc with --samples)."
    ),
    arguments=[
        arg("--x-min", type=float, default=-0.2, help="Left end of the grid"),
        arg("--x-max", type=float, default=0.2, help="Right end of the grid"),
        arg("--x-points", type=int, default=401, help="Grid points"),
        arg("--samples", type=int, default=0, help="Add a sampler histogram column"),
    ],
)
def cmd_density(
    config: RunConfig,
    x_min: float = -0.2,
    x_max: float = 0.2,
    x_points: int = 401,
    samples: int = 0,
) -> Table:
    """Tabulate f_v and f_0."""
    params = config.params
    xs = x_grid(x_min, x_max, x_points)
    columns = ["x", "f_v", "f_0"]
    table = np.column_stack(
        (xs, density_or_nan(params, xs), density_or_nan(params.with_v(0.0), xs))
    )
    if samples > 0:
        columns.append("f_mc")
        table = np.column_stack((table, empirical_density(params, xs, samples, config.seed)))
    return handler.format_table(
        "density", columns, table.tolist(), config=config, samples=samples
    )


@cli.command(
    name="convergence",
    title="Convergence To Double Gamma",
    description=(
        "Sup-norm distance of f_v to f_0 on an x grid for each v. Columns: v, sup_distance."
    ),
    arguments=[
        arg("--v-list", type=float, nargs="+", help="Component volatilities"),
        arg("--x-min", type=float, default=-0.2, help="Left end of the grid"),
        arg("--x-max", type=float, default=0.2, help="Right end of the grid"),
        arg("--x-points", type=int, default=401, help="Grid points"),
    ],
)
def cmd_convergence(
    config: RunConfig,
    v_list: list[float] | None = None,
    x_min: float = -0.2,
    x_max: float = 0.2,
    x_points: int = 401,
) -> Table:
    """Distance to the v = 0 limit along a list of v."""
    params = config.params
    xs = x_grid(x_min, x_max, x_points)
    if not shape.density_is_finite_at_zero(params.with_v(0.0)):
        xs = xs[xs != 0]
    rows = [
        [v, vgmodel.sup_distance_to_limit(params.with_v(v), xs)]
        for v in (v_list or DEFAULT_V_LIST)
    ]
    return handler.format_table(
        "convergence", ["v", "sup_distance"], rows, config=config, x_min=x_min, x_max=x_max
    )
