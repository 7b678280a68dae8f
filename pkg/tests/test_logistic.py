"""Bernoulli-logit solver: quadratic-bound fixed point, online xi protocol,
and truth recovery on the one-dimensional binary benchmark."""

import math

import numpy as np
import pytest

from streamvb.lmm import BlockSpec, prior_precision_diag
from streamvb.logistic import (
    LogisticState,
    fit_batch_logistic,
    posterior_curve,
    seed_online_stats,
    step_online_logistic,
    xi_for_row,
)
from streamvb.simdata import SimConfig, binary_1d_probability, gen_binary_1d
from streamvb.special import lambda_jj
from streamvb.splines import make_knots


def _binary_spline_data(seed=0, n=600, K=15):
    cfg = SimConfig(seed=seed, n=n, scenario="binary_1d")
    data = list(gen_binary_1d(cfg))
    xs = np.array([d[1] for d in data])
    ys = np.array([d[0] for d in data])
    basis = make_knots(xs, K)
    c = np.array([np.concatenate([[1.0, x], basis(x)]) for x in xs])
    spec = BlockSpec(p=2, block_sizes=(K,))
    return ys, c, xs, basis, spec


class TestXi:
    def test_formula_oracle(self):
        rng = np.random.default_rng(1)
        spec = BlockSpec(p=2, block_sizes=(3,))
        state = LogisticState.initial(spec)
        state.mu_bu = rng.standard_normal(5)
        a = rng.standard_normal((5, 5))
        state.Sigma_bu = a @ a.T + np.eye(5)
        c = rng.standard_normal(5)
        expected = math.sqrt(c @ state.Sigma_bu @ c + (c @ state.mu_bu) ** 2)
        assert xi_for_row(state, c) == pytest.approx(expected, rel=1e-12)

    def test_nonnegative(self):
        spec = BlockSpec(p=1, block_sizes=(1,))
        state = LogisticState.initial(spec)
        assert xi_for_row(state, np.zeros(2)) == 0.0


class TestBatchFixedPoint:
    def test_self_consistency_independent_formulas(self):
        y, c, _, _, spec = _binary_spline_data()
        res = fit_batch_logistic(y, c, spec, tol=1e-12, max_iter=3000)
        assert res.converged
        st, xi = res.state, res.xi
        # Independent transcription: Sigma = (2 C' diag(lambda(xi)) C + prior)^-1,
        # mu = Sigma C'(y - 1/2), xi_i^2 = c_i'(Sigma + mu mu')c_i.
        lam = np.array([lambda_jj(x) for x in xi])
        prior = np.diag(prior_precision_diag(spec, st.mu_recip_sigsq_u))
        sigma_oracle = np.linalg.inv(2.0 * c.T @ (lam[:, None] * c) + prior)
        mu_oracle = sigma_oracle @ (c.T @ (y - 0.5))
        assert np.allclose(st.Sigma_bu, sigma_oracle, atol=1e-7)
        assert np.allclose(st.mu_bu, mu_oracle, atol=1e-6)
        quad = np.sum((c @ st.Sigma_bu) * c, axis=1) + (c @ st.mu_bu) ** 2
        assert np.allclose(xi, np.sqrt(quad), rtol=1e-5)

    def test_block_pair_self_consistency(self):
        y, c, _, _, spec = _binary_spline_data(seed=1)
        res = fit_batch_logistic(y, c, spec, tol=1e-12, max_iter=3000)
        st = res.state
        sl = spec.block_slice(0)
        recip_a = 1.0 / (st.mu_recip_sigsq_u[0] + spec.A_u[0] ** -2)
        assert st.mu_recip_a_u[0] == pytest.approx(recip_a, rel=1e-5)
        denom = (2.0 * st.mu_recip_a_u[0]
                 + float(st.mu_bu[sl] @ st.mu_bu[sl])
                 + float(np.trace(st.Sigma_bu[sl, sl])))
        assert st.mu_recip_sigsq_u[0] == pytest.approx(
            (spec.block_sizes[0] + 1) / denom, rel=1e-5
        )


class TestOnlineProtocol:
    def test_xi_computed_before_accumulation(self):
        # The arriving row's xi must come from the state prior to folding the
        # row in; verify against a manual replay of that order.
        y, c, _, _, spec = _binary_spline_data(seed=2, n=120)
        res = fit_batch_logistic(y[:100], c[:100], spec)
        stats = seed_online_stats(y[:100], c[:100], res.xi)
        state = res.state
        xi_expected = xi_for_row(state, c[100])
        manual = stats.copy()
        manual.update(int(y[100]), c[100], xi_expected)
        new_state, new_stats = step_online_logistic(state, stats, int(y[100]),
                                                    c[100], spec)
        assert np.allclose(new_stats.ct_lam_c, manual.ct_lam_c)
        assert np.allclose(new_stats.cty_half, manual.cty_half)

    def test_xi_frozen_forever(self):
        # Later state changes must not alter previously accumulated lambda
        # contributions: replaying the same rows yields identical statistics.
        y, c, _, _, spec = _binary_spline_data(seed=3, n=150)
        res = fit_batch_logistic(y[:100], c[:100], spec)
        state, stats = res.state, seed_online_stats(y[:100], c[:100], res.xi)
        recorded = []
        for i in range(100, 150):
            recorded.append(xi_for_row(state, c[i]))
            state, stats = step_online_logistic(state, stats, int(y[i]), c[i], spec)
        replay = seed_online_stats(y[:100], c[:100], res.xi)
        for i, xi in zip(range(100, 150), recorded):
            replay.update(int(y[i]), c[i], xi)
        assert np.allclose(stats.ct_lam_c, replay.ct_lam_c)


class TestRecovery:
    def test_binary_1d_curve_near_truth(self):
        y, c, xs, basis, spec = _binary_spline_data(seed=4, n=2500, K=20)
        res = fit_batch_logistic(y, c, spec)
        grid = np.array([0.2, 0.35, 0.5, 0.65, 0.8])
        mean, lo, hi = posterior_curve(res.state, basis, grid)
        for g, m, l, h in zip(grid, mean, lo, hi):
            true_logit = math.cos(4 * math.pi * g) + 2 * g - 1
            # Truth within a slightly widened 95% band (1.2x half-width).
            half = 0.5 * (h - l)
            assert abs(m - true_logit) < 1.2 * half

    def test_probability_truth_values(self):
        assert binary_1d_probability(0.0) == 0.5
        assert binary_1d_probability(0.25) == pytest.approx(
            1.0 / (1.0 + math.exp(1.5)), rel=1e-12
        )


class TestValidation:
    def test_row_count_mismatch(self):
        spec = BlockSpec(p=1, block_sizes=(1,))
        with pytest.raises(ValueError):
            fit_batch_logistic(np.zeros(3), np.zeros((4, 2)), spec)

    def test_online_rejects_nonbinary(self):
        y, c, _, _, spec = _binary_spline_data(seed=5, n=60)
        res = fit_batch_logistic(y[:50], c[:50], spec)
        stats = seed_online_stats(y[:50], c[:50], res.xi)
        with pytest.raises(ValueError):
            step_online_logistic(res.state, stats, 2, c[50], spec)
