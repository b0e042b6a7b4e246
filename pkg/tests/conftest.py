"""Shared pytest fixtures."""

import pytest

from vgsmile.models.params import Accuracy, MixtureParams

from .fixtures.params import BASELINE_V, baseline_params, half_shape_params


@pytest.fixture
def accuracy() -> Accuracy:
    return Accuracy()


@pytest.fixture
def vg_params() -> MixtureParams:
    """Baseline set at v = 0.02."""
    return baseline_params(0.02)


@pytest.fixture
def double_gamma() -> MixtureParams:
    """Baseline set at v = 0."""
    return baseline_params(0.0)


@pytest.fixture
def half_shape() -> MixtureParams:
    return half_shape_params()


@pytest.fixture(params=BASELINE_V, ids=lambda v: f"v={v}")
def any_baseline_params(request: pytest.FixtureRequest) -> MixtureParams:
    """Baseline set at each plotted v."""
    return baseline_params(request.param)
