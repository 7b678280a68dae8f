"""Warm-up acceptance protocol: grid layout, identity anchor, scoring,
determinism, and the recommendation rule."""

import numpy as np
import pytest

from streamvb.diagnostics import (
    DiagnosticTrace,
    LinRegAdapter,
    divergence_score,
    recommend,
    run_warmup_protocol,
    _grid,
)


def _linreg_pairs(seed=0, n=300, p=3):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, p))
    beta = rng.uniform(-1, 1, p)
    y = x @ beta + rng.standard_normal(n)
    c = np.column_stack([np.ones(n), x])
    return list(zip(y, c))


class TestGrid:
    def test_eleven_points_starting_at_warmup(self):
        grid = _grid(100, 100)
        assert grid.shape == (11,)
        assert grid[0] == 100
        assert grid[-1] == 200
        assert np.array_equal(grid, [100, 110, 120, 130, 140, 150,
                                     160, 170, 180, 190, 200])

    def test_rounding_for_uneven_windows(self):
        grid = _grid(50, 33)
        assert grid[0] == 50
        assert grid[-1] == 83
        assert np.all(np.diff(grid) >= 1)


class TestProtocol:
    def test_identity_anchor_at_first_grid_point(self):
        trace = run_warmup_protocol(_linreg_pairs(), 100, 100, LinRegAdapter())
        # Both series are seeded from the same warm-up batch fit, so the
        # first grid point must agree exactly.
        assert np.allclose(trace.online_mean[0], trace.batch_mean[0])
        assert np.allclose(trace.online_q025[0], trace.batch_q025[0])

    def test_deterministic(self):
        a = run_warmup_protocol(_linreg_pairs(seed=1), 100, 100, LinRegAdapter())
        b = run_warmup_protocol(_linreg_pairs(seed=1), 100, 100, LinRegAdapter())
        assert np.array_equal(a.online_mean, b.online_mean)
        assert np.array_equal(a.batch_mean, b.batch_mean)
        assert divergence_score(a) == divergence_score(b)

    def test_requires_enough_data(self):
        with pytest.raises(ValueError):
            run_warmup_protocol(_linreg_pairs(n=150), 100, 100, LinRegAdapter())

    def test_requires_minimum_validation_window(self):
        with pytest.raises(ValueError):
            run_warmup_protocol(_linreg_pairs(), 100, 5, LinRegAdapter())

    def test_trace_rows_shape(self):
        trace = run_warmup_protocol(_linreg_pairs(), 100, 100, LinRegAdapter())
        rows = trace.rows()
        assert len(rows) == 11 * len(trace.labels) * 2
        series = {r[2] for r in rows}
        assert series == {"batch", "online"}


class TestScore:
    def test_zero_gap_scores_zero(self):
        trace = DiagnosticTrace(
            sample_sizes=np.array([10, 20]),
            labels=["a"],
            batch_mean=np.array([[1.0], [2.0]]),
            batch_q025=np.array([[0.5], [1.5]]),
            batch_q975=np.array([[1.5], [2.5]]),
            online_mean=np.array([[1.0], [2.0]]),
            online_q025=np.array([[0.5], [1.5]]),
            online_q975=np.array([[1.5], [2.5]]),
        )
        assert divergence_score(trace) == 0.0

    def test_gap_in_half_width_units(self):
        trace = DiagnosticTrace(
            sample_sizes=np.array([10]),
            labels=["a"],
            batch_mean=np.array([[0.0]]),
            batch_q025=np.array([[-1.0]]),
            batch_q975=np.array([[1.0]]),
            online_mean=np.array([[0.75]]),  # 0.75 of the half-width 1.0
            online_q025=np.array([[-1.0]]),
            online_q975=np.array([[1.0]]),
        )
        assert divergence_score(trace) == pytest.approx(0.75)

    def test_degenerate_interval_floored(self):
        trace = DiagnosticTrace(
            sample_sizes=np.array([10]),
            labels=["a"],
            batch_mean=np.array([[0.0]]),
            batch_q025=np.array([[0.0]]),
            batch_q975=np.array([[0.0]]),
            online_mean=np.array([[1e-6]]),
            online_q025=np.array([[0.0]]),
            online_q975=np.array([[0.0]]),
        )
        assert np.isfinite(divergence_score(trace))
        assert divergence_score(trace) > 0


class TestRecommendation:
    def _trace(self, gap, flagged=False):
        return DiagnosticTrace(
            sample_sizes=np.array([100]),
            labels=["a"],
            batch_mean=np.array([[0.0]]),
            batch_q025=np.array([[-1.0]]),
            batch_q975=np.array([[1.0]]),
            online_mean=np.array([[gap]]),
            online_q025=np.array([[-1.0]]),
            online_q975=np.array([[1.0]]),
            flagged=flagged,
        )

    def test_accept_below_threshold(self):
        rec = recommend(self._trace(0.3))
        assert rec.decision == "accept"
        assert rec.suggested_n_warm == 100

    def test_reject_suggests_doubling(self):
        rec = recommend(self._trace(0.9))
        assert rec.decision == "increase_warmup"
        assert rec.suggested_n_warm == 200

    def test_flagged_fit_rejects_even_with_small_score(self):
        rec = recommend(self._trace(0.1, flagged=True))
        assert rec.decision == "increase_warmup"

    def test_custom_threshold(self):
        assert recommend(self._trace(0.9), threshold=1.0).decision == "accept"


class TestOnlineTrackingQuality:
    def test_online_stays_inside_batch_intervals(self):
        # Behavioral check that the online series tracks the batch series for
        # a well-conditioned Gaussian problem.
        trace = run_warmup_protocol(_linreg_pairs(seed=2, n=400), 150, 150,
                                    LinRegAdapter())
        assert divergence_score(trace) < 0.5
