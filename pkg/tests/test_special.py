"""Special-function tests against independent high-precision oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sps
from scipy import stats

from streamvb.special import (
    InverseGammaParams,
    digamma,
    inv_gamma_log_density,
    inv_gamma_mean_reciprocal,
    lambda_jj,
)


class TestDigamma:
    def test_against_scipy_dense_grid(self):
        # 1e4 log-spaced points spanning the solver-relevant range.
        xs = np.logspace(-3, 6, 10_000)
        ours = np.array([digamma(x) for x in xs])
        oracle = sps.digamma(xs)
        assert np.max(np.abs(ours - oracle)) < 1e-10

    def test_special_values(self):
        # psi(1) = -EulerGamma; psi(1/2) = -EulerGamma - 2 ln 2 (classical values).
        euler_gamma = 0.5772156649015329
        assert digamma(1.0) == pytest.approx(-euler_gamma, abs=1e-12)
        assert digamma(0.5) == pytest.approx(-euler_gamma - 2 * math.log(2), abs=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            digamma(0.0)
        with pytest.raises(ValueError):
            digamma(-1.5)

    @given(st.floats(min_value=1e-2, max_value=1e5))
    @settings(max_examples=200, deadline=None)
    def test_recurrence_property(self, x):
        # psi(x + 1) = psi(x) + 1/x, an identity independent of any series.
        assert digamma(x + 1.0) == pytest.approx(digamma(x) + 1.0 / x, abs=1e-9, rel=1e-9)

    @given(st.floats(min_value=0.5, max_value=1e4))
    @settings(max_examples=100, deadline=None)
    def test_monotone_property(self, x):
        assert digamma(x + 0.25) > digamma(x)


class TestLambdaJJ:
    def test_limit_at_zero(self):
        assert lambda_jj(0.0) == 0.125
        assert lambda_jj(1e-9) == 0.125

    def test_matches_formula(self):
        for xi in (1e-6, 1e-3, 0.1, 1.0, 5.0, 40.0):
            assert lambda_jj(xi) == pytest.approx(math.tanh(xi / 2) / (4 * xi), rel=1e-12)

    def test_continuity_at_threshold(self):
        # Values just above the analytic-limit threshold stay near 1/8.
        assert lambda_jj(2e-8) == pytest.approx(0.125, abs=1e-12)

    @given(st.floats(min_value=-50, max_value=50))
    @settings(max_examples=200, deadline=None)
    def test_even_function(self, xi):
        assert lambda_jj(xi) == lambda_jj(-xi)

    @given(st.floats(min_value=1e-6, max_value=100))
    @settings(max_examples=200, deadline=None)
    def test_positive_and_bounded(self, xi):
        val = lambda_jj(xi)
        assert 0.0 < val <= 0.125


class TestInverseGamma:
    def test_params_validation(self):
        with pytest.raises(ValueError):
            InverseGammaParams(shape=0.0, rate=1.0)
        with pytest.raises(ValueError):
            InverseGammaParams(shape=1.0, rate=-2.0)

    def test_mean_reciprocal_is_shape_over_rate(self):
        params = InverseGammaParams(shape=3.5, rate=2.0)
        assert inv_gamma_mean_reciprocal(params) == pytest.approx(1.75)

    def test_mean_reciprocal_monte_carlo(self):
        # Independent oracle: E(1/v) estimated from scipy invgamma samples.
        params = InverseGammaParams(shape=4.0, rate=3.0)
        rng = np.random.default_rng(0)
        draws = stats.invgamma.rvs(params.shape, scale=params.rate,
                                   size=200_000, random_state=rng)
        mc = np.mean(1.0 / draws)
        se = np.std(1.0 / draws) / np.sqrt(draws.size)
        assert abs(mc - inv_gamma_mean_reciprocal(params)) < 4 * se

    def test_log_density_matches_scipy(self):
        params = InverseGammaParams(shape=2.5, rate=1.7)
        for v in (0.05, 0.5, 1.0, 3.0, 20.0):
            oracle = stats.invgamma.logpdf(v, params.shape, scale=params.rate)
            assert inv_gamma_log_density(v, params) == pytest.approx(oracle, abs=1e-12)

    def test_log_density_normalizes(self):
        # Quadrature oracle: the density integrates to 1.
        from scipy.integrate import quad

        params = InverseGammaParams(shape=3.0, rate=2.0)
        total, _ = quad(lambda v: math.exp(inv_gamma_log_density(v, params)), 0, np.inf)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_rejects_nonpositive_argument(self):
        with pytest.raises(ValueError):
            inv_gamma_log_density(0.0, InverseGammaParams(1.0, 1.0))
