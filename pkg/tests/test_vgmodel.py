import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest
from scipy import stats

from vgsmile.core import pricing, vgmodel
from vgsmile.core.quadrature import integrate_adaptive
from vgsmile.exceptions import (
    DomainError,
    NotRepresentableError,
    ParameterValidationError,
    SingularityError,
)
from vgsmile.models.params import Accuracy, MixtureParams, Sign

from .fixtures.params import (
    ALPHA,
    BASELINE,
    LAMBDA_MINUS,
    LAMBDA_PLUS,
    P_MINUS,
    baseline_params,
)

SYMMETRY_GRID = np.linspace(-0.3, 0.3, 121)


def integrate_density(params: MixtureParams, weight=lambda x: 1.0) -> float:
    """Integral of weight(x) f(x) over the real line, split at the kink at zero."""
    accuracy = Accuracy()
    left_cut, right_cut = vgmodel.tail_cutoffs(params)

    def integrand(x: float) -> float:
        return weight(x) * float(vgmodel.mixture_density(x, params))

    return integrate_adaptive(
        integrand, -left_cut, 0.0, accuracy, operation="test", points=[-0.4, -0.1, -0.01]
    ) + integrate_adaptive(
        integrand, 0.0, right_cut, accuracy, operation="test", points=[0.01, 0.1, 0.4]
    )


class TestParameters:
    def test_derived_quantities(self, vg_params: MixtureParams) -> None:
        comp = vgmodel.derive(vg_params)
        assert comp.alpha == pytest.approx(ALPHA, abs=1e-5)
        assert comp.beta_plus == pytest.approx(49.5, abs=1e-12)
        assert comp.beta_minus == pytest.approx(-50.5, abs=1e-12)
        assert comp.a == pytest.approx(1.0404, abs=1e-12)
        assert comp.b == pytest.approx(0.9604, abs=1e-12)
        assert comp.p == pytest.approx(P_MINUS, abs=1e-6)
        assert comp.weight_plus + comp.weight_minus == pytest.approx(1.0)

    def test_double_gamma_has_no_bessel_form(self, double_gamma: MixtureParams) -> None:
        comp = vgmodel.derive(double_gamma)
        assert not comp.has_bessel_form
        assert comp.lambda_plus == pytest.approx(LAMBDA_PLUS)
        assert comp.lambda_minus == pytest.approx(LAMBDA_MINUS)

    def test_drift_bound_is_enforced(self) -> None:
        with pytest.raises(ParameterValidationError, match="mu < 2\\*lambda"):
            vgmodel.make_params(v=0.02, c=2.0, lam=0.5, mu=1.0)

    @pytest.mark.parametrize(
        "overrides",
        [{"v": -0.01}, {"c": 0.0}, {"mu": 0.0}, {"T": -1.0}, {"v": math.nan}],
    )
    def test_invalid_values_are_rejected(self, overrides: dict) -> None:
        with pytest.raises(ParameterValidationError):
            vgmodel.make_params(**{**BASELINE, "v": 0.02, **overrides})

    def test_lambda_alias(self) -> None:
        params = MixtureParams(**{"v": 0.02, "c": 2.0, "lambda": 0.5, "mu": 0.02})
        assert params.lam == 0.5


class TestExponents:
    def test_ell(self) -> None:
        assert vgmodel.ell(0.25, 2.0, 0.5) == pytest.approx(1.386294, abs=1e-6)

    def test_ell_singularity(self) -> None:
        with pytest.raises(DomainError) as exc_info:
            vgmodel.ell(0.5, 2.0, 0.5)
        assert exc_info.value.boundary == 0.5

    @pytest.mark.parametrize("sign", list(Sign))
    def test_component_is_a_martingale(self, vg_params: MixtureParams, sign: Sign) -> None:
        assert vgmodel.psi(0.0, sign, vg_params) == pytest.approx(0.0, abs=1e-15)
        # E[e^{Y-}] = b/a and E[e^{Y+}] = a/b, so the mixture has unit mean
        comp = vgmodel.derive(vg_params)
        expected = comp.a / comp.b if sign is Sign.PLUS else comp.b / comp.a
        assert vgmodel.component_mgf(1.0, sign, vg_params) == pytest.approx(expected, rel=1e-12)

    def test_mgf_at_zero_and_one(self, any_baseline_params: MixtureParams) -> None:
        assert vgmodel.mgf(0.0, any_baseline_params) == pytest.approx(1.0, rel=1e-12)
        assert vgmodel.mgf(1.0, any_baseline_params) == pytest.approx(1.0, rel=1e-12)

    @given(fraction=st.floats(min_value=0.02, max_value=0.98))
    @settings(max_examples=20, deadline=None)
    def test_mgf_symmetry(self, fraction: float) -> None:
        params = baseline_params(0.02)
        lower, upper = vgmodel.finiteness_interval(params)
        u = lower + fraction * (upper - lower)
        assert vgmodel.mgf(u, params) == pytest.approx(vgmodel.mgf(1.0 - u, params), rel=1e-12)

    def test_mgf_outside_interval_raises(self, vg_params: MixtureParams) -> None:
        _, upper = vgmodel.finiteness_interval(vg_params)
        with pytest.raises(DomainError):
            vgmodel.mgf(upper + 0.1, vg_params)

    @pytest.mark.parametrize("u", [0.1, 0.5, 0.9])
    @pytest.mark.parametrize("sign", list(Sign))
    def test_standard_parameterization_matches(
        self, vg_params: MixtureParams, u: float, sign: Sign
    ) -> None:
        std = vgmodel.to_std_vg(vg_params, sign)
        assert vgmodel.psi_std_vg(u, std) == pytest.approx(
            vgmodel.psi(u, sign, vg_params), rel=1e-12, abs=1e-15
        )

    def test_standard_parameterization_excludes_double_gamma(
        self, double_gamma: MixtureParams
    ) -> None:
        with pytest.raises(NotRepresentableError):
            vgmodel.to_std_vg(double_gamma, Sign.PLUS)


class TestExplosion:
    def test_double_gamma_order(self, double_gamma: MixtureParams) -> None:
        assert vgmodel.explosion_order(double_gamma) == pytest.approx(LAMBDA_PLUS, abs=1e-12)

    def test_order_matches_alpha_beta_gap(self, vg_params: MixtureParams) -> None:
        r_star = vgmodel.explosion_order(vg_params)
        assert r_star == pytest.approx(21.2125, abs=1e-4)
        right_gap, _ = vgmodel.alpha_beta_gaps(vg_params)
        assert r_star == pytest.approx(right_gap, abs=1e-10)

    def test_order_approaches_limit_rate(self) -> None:
        orders = [vgmodel.explosion_order(baseline_params(v)) for v in (0.02, 0.01, 0.005)]
        assert orders[0] < orders[1] < orders[2] < LAMBDA_PLUS

    def test_gaps_tend_to_limit_rates(self) -> None:
        right, left = vgmodel.alpha_beta_gaps(baseline_params(1e-4))
        assert right == pytest.approx(LAMBDA_PLUS, rel=1e-4)
        assert left == pytest.approx(LAMBDA_MINUS, rel=1e-4)


class TestDensity:
    def test_normalization_and_risk_neutrality(self, any_baseline_params: MixtureParams) -> None:
        assert integrate_density(any_baseline_params) == pytest.approx(1.0, abs=1e-8)
        assert integrate_density(any_baseline_params, math.exp) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("u", [-5.0, 0.25, 5.0])
    def test_density_matches_mgf(self, vg_params: MixtureParams, u: float) -> None:
        value = integrate_density(vg_params, lambda x: math.exp(u * x))
        assert value == pytest.approx(vgmodel.mgf(u, vg_params), rel=1e-7)

    def test_geometric_symmetry(self, any_baseline_params: MixtureParams) -> None:
        xs = SYMMETRY_GRID[SYMMETRY_GRID != 0]
        lhs = np.exp(xs / 2) * vgmodel.mixture_density(xs, any_baseline_params)
        rhs = np.exp(-xs / 2) * vgmodel.mixture_density(-xs, any_baseline_params)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-10)

    def test_component_relation(self, vg_params: MixtureParams) -> None:
        comp = vgmodel.derive(vg_params)
        xs = SYMMETRY_GRID[SYMMETRY_GRID != 0]
        lhs = comp.b * np.exp(xs / 2) * vgmodel.component_density(xs, Sign.PLUS, vg_params)
        rhs = comp.a * np.exp(-xs / 2) * vgmodel.component_density(-xs, Sign.MINUS, vg_params)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-10)

    def test_component_exponential_moment(self, vg_params: MixtureParams) -> None:
        left_cut, right_cut = vgmodel.tail_cutoffs(vg_params)

        def integrand(x: float) -> float:
            return math.exp(x) * float(vgmodel.component_density(x, Sign.PLUS, vg_params))

        value = integrate_adaptive(
            integrand, -left_cut, 0.0, Accuracy(), "test", points=[-0.1, -0.01]
        ) + integrate_adaptive(integrand, 0.0, right_cut, Accuracy(), "test", points=[0.01, 0.1])
        assert value == pytest.approx(vgmodel.component_mgf(1.0, Sign.PLUS, vg_params), rel=1e-8)

    def test_finite_at_zero_above_half_shape(self, vg_params: MixtureParams) -> None:
        value = vgmodel.mixture_density(0.0, vg_params)
        assert 0 < value < math.inf
        assert value == pytest.approx(vgmodel.mixture_density(1e-9, vg_params), rel=1e-6)

    def test_singular_at_zero_for_small_shape(self) -> None:
        with pytest.raises(SingularityError):
            vgmodel.mixture_density(0.0, baseline_params(0.02, c=0.5))

    def test_scalar_and_array_forms_agree(self, vg_params: MixtureParams) -> None:
        xs = np.array([-0.05, 0.0, 0.05])
        values = vgmodel.mixture_density(xs, vg_params)
        assert isinstance(values, np.ndarray)
        for x, value in zip(xs, values, strict=True):
            assert vgmodel.mixture_density(float(x), vg_params) == pytest.approx(value, rel=1e-14)

    def test_density_grid(self, vg_params: MixtureParams) -> None:
        grid = vgmodel.density_grid(vg_params, [-0.1, 0.0, 0.1])
        assert len(grid.values) == 3
        assert all(value > 0 for value in grid.values)


class TestDoubleGamma:
    def test_vanishes_at_zero(self, double_gamma: MixtureParams) -> None:
        assert vgmodel.mixture_density(0.0, double_gamma) == 0.0

    def test_modes(self, double_gamma: MixtureParams) -> None:
        left, right = vgmodel.double_gamma_modes(double_gamma)
        assert right == pytest.approx(1 / 25.5, abs=1e-12)
        assert left == pytest.approx(-1 / 24.5, abs=1e-12)

    def test_numerical_modes(self, double_gamma: MixtureParams) -> None:
        right_xs = np.linspace(1e-6, 0.1, 100_000)
        left_xs = -right_xs
        right_mode = right_xs[np.argmax(vgmodel.mixture_density(right_xs, double_gamma))]
        left_mode = left_xs[np.argmax(vgmodel.mixture_density(left_xs, double_gamma))]
        assert right_mode == pytest.approx(0.0392157, abs=1e-5)
        assert left_mode == pytest.approx(-0.0408163, abs=1e-5)

    def test_modes_need_shape_above_one(self) -> None:
        with pytest.raises(DomainError):
            vgmodel.double_gamma_modes(baseline_params(0.0, c=1.0))

    def test_unit_shape_one_sided_limits(self) -> None:
        params = baseline_params(0.0, c=1.0)
        comp = vgmodel.derive(params)
        limits = vgmodel.double_gamma_one_sided_limits(params)
        assert limits.left == pytest.approx(comp.p * LAMBDA_MINUS)
        assert limits.right == pytest.approx((1 - comp.p) * LAMBDA_PLUS)

    def test_small_shape_is_singular(self) -> None:
        params = baseline_params(0.0, c=0.5)
        assert not vgmodel.double_gamma_one_sided_limits(params).continuous
        with pytest.raises(SingularityError):
            vgmodel.double_gamma_density(0.0, params)

    def test_rejects_positive_v(self, vg_params: MixtureParams) -> None:
        with pytest.raises(ParameterValidationError):
            vgmodel.double_gamma_density(0.1, vg_params)

    def test_converges_as_v_vanishes(self, double_gamma: MixtureParams) -> None:
        xs = np.linspace(-0.2, 0.2, 401)
        distances = [
            vgmodel.sup_distance_to_limit(double_gamma.with_v(v), xs)
            for v in (0.02, 0.015, 0.01, 0.005)
        ]
        assert all(a > b for a, b in zip(distances, distances[1:], strict=False))

    def test_bessel_factor_tends_to_one(self) -> None:
        factors = [vgmodel.bessel_convergence_factor(alpha, 0.05, 1.5) for alpha in (1e2, 1e4, 1e6)]
        assert abs(factors[2] - 1) < abs(factors[1] - 1) < abs(factors[0] - 1)
        assert factors[2] == pytest.approx(1.0, abs=1e-4)


class TestSampler:
    def test_reproducible(self, vg_params: MixtureParams) -> None:
        np.testing.assert_array_equal(
            vgmodel.sample(vg_params, 100, seed=7), vgmodel.sample(vg_params, 100, seed=7)
        )

    def test_rejects_empty_sample(self, vg_params: MixtureParams) -> None:
        with pytest.raises(ParameterValidationError):
            vgmodel.sample(vg_params, 0)

    @pytest.mark.slow
    @pytest.mark.parametrize("v", [0.0, 0.02])
    def test_matches_model_distribution(self, v: float) -> None:
        params = baseline_params(v)
        draws = np.sort(vgmodel.sample(params, 1_000_000, seed=2024))
        xs = np.linspace(-0.15, 0.15, 31)
        empirical = np.searchsorted(draws, xs, side="right") / draws.size
        model = np.array([pricing.q_function(float(x), params) for x in xs])
        assert np.max(np.abs(empirical - model)) < 0.002

        growth = np.exp(draws)
        standard_error = growth.std() / math.sqrt(draws.size)
        assert abs(growth.mean() - 1.0) < 3 * standard_error

    @pytest.mark.slow
    def test_double_gamma_sign_split(self, double_gamma: MixtureParams) -> None:
        n = 1_000_000
        draws = vgmodel.sample(double_gamma, n, seed=11)
        expected = 1 - P_MINUS
        standard_error = math.sqrt(expected * (1 - expected) / n)
        assert abs(np.mean(draws > 0) - expected) < 3 * standard_error

    @pytest.mark.slow
    @pytest.mark.parametrize("u", [-2.0, 0.5, 2.0])
    def test_exponential_moments_match_characteristic_exponents(
        self, vg_params: MixtureParams, u: float
    ) -> None:
        draws = vgmodel.sample(vg_params, 1_000_000, seed=99)
        growth = np.exp(u * draws)
        p = vgmodel.derive(vg_params).p
        expected = p * vgmodel.component_mgf(u, Sign.MINUS, vg_params) + (
            1 - p
        ) * vgmodel.component_mgf(u, Sign.PLUS, vg_params)
        standard_error = growth.std() / math.sqrt(draws.size)
        assert abs(growth.mean() - expected) < 4 * standard_error
        assert expected == pytest.approx(vgmodel.mgf(u, vg_params), rel=1e-10)

    @pytest.mark.slow
    def test_density_matches_kernel_estimate(self, vg_params: MixtureParams) -> None:
        draws = vgmodel.sample(vg_params, 1_000_000, seed=5)
        xs = np.array([-0.05, 0.0, 0.05])
        estimate = stats.gaussian_kde(draws)(xs)
        np.testing.assert_allclose(vgmodel.mixture_density(xs, vg_params), estimate, rtol=0.03)
