"""Batch-based warm-up tuning and online-vs-batch convergence diagnosis.

The protocol batch-fits a warm-up prefix, seeds the online solver from that
fit, runs online updates through a validation window while independently
batch-fitting each grid prefix, and scores the divergence between the two
trajectories in units of batch credible-interval half-widths.  The score is a
quantitative stand-in for visual inspection of the trace, which is emitted in
full so a human can still plot it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linreg, lmm, logistic, sparse
from .suffstats import LogisticMoments, SparseMoments, StreamingMoments
from .summaries import invgamma_summary, normal_summary

__all__ = [
    "DiagnosticTrace",
    "Recommendation",
    "LinRegAdapter",
    "LMMAdapter",
    "LogisticAdapter",
    "SparseAdapter",
    "run_warmup_protocol",
    "divergence_score",
    "recommend",
]

DEFAULT_THRESHOLD = 0.5
GRID_INTERVALS = 10


@dataclass
class DiagnosticTrace:
    sample_sizes: np.ndarray
    labels: list
    batch_mean: np.ndarray
    batch_q025: np.ndarray
    batch_q975: np.ndarray
    online_mean: np.ndarray
    online_q025: np.ndarray
    online_q975: np.ndarray
    flagged: bool = False
    notes: list = field(default_factory=list)

    def rows(self):
        """Flat rows {n, parameter, series, mean, q025, q975} for CSV output."""
        out = []
        for g, n in enumerate(self.sample_sizes):
            for j, label in enumerate(self.labels):
                out.append(
                    (int(n), label, "batch", self.batch_mean[g, j],
                     self.batch_q025[g, j], self.batch_q975[g, j])
                )
                out.append(
                    (int(n), label, "online", self.online_mean[g, j],
                     self.online_q025[g, j], self.online_q975[g, j])
                )
        return out


@dataclass(frozen=True)
class Recommendation:
    decision: str  # "accept" or "increase_warmup"
    score: float
    suggested_n_warm: int


class LinRegAdapter:
    """Gaussian linear regression solver surface for the warm-up protocol."""

    def __init__(self, hyper=None, names=None, tol=1e-8, max_iter=500):
        self.hyper = hyper or linreg.LinRegHyper()
        self.names = names
        self.tol = tol
        self.max_iter = max_iter

    def _fit(self, y, c):
        stats = StreamingMoments.from_batch(y, c)
        return linreg.fit_stats(stats, self.hyper, self.tol, self.max_iter), stats

    def warm_start(self, y, c):
        res, stats = self._fit(y, c)
        return (res.state, stats), res.converged

    def step(self, ctx, y_new, c_new):
        state, stats = ctx
        return linreg.step_online(state, stats, y_new, c_new, self.hyper)

    def summarize(self, ctx):
        state, stats = ctx
        return linreg.posterior_summary(state, stats, self.names)

    def batch_summaries(self, y, c):
        res, stats = self._fit(y, c)
        return linreg.posterior_summary(res.state, stats, self.names), res.converged


class LMMAdapter:
    """Gaussian linear mixed model solver surface for the warm-up protocol."""

    def __init__(self, spec, names=None, tol=1e-8, max_iter=500):
        self.spec = spec
        self.names = names
        self.tol = tol
        self.max_iter = max_iter

    def _fit(self, y, c):
        stats = StreamingMoments.from_batch(y, c)
        return lmm.fit_stats_lmm(stats, self.spec, self.tol, self.max_iter), stats

    def warm_start(self, y, c):
        res, stats = self._fit(y, c)
        return (res.state, stats), res.converged

    def step(self, ctx, y_new, c_new):
        state, stats = ctx
        return lmm.step_online_lmm(state, stats, y_new, c_new, self.spec)

    def summarize(self, ctx):
        state, stats = ctx
        return lmm.posterior_summary_lmm(state, stats, self.spec, self.names)

    def batch_summaries(self, y, c):
        res, stats = self._fit(y, c)
        return lmm.posterior_summary_lmm(res.state, stats, self.spec, self.names), res.converged


class LogisticAdapter:
    """Bernoulli-logit mixed model solver surface for the warm-up protocol.

    ``contrasts`` is an optional list of (label, design_row) pairs; when
    given, the tracked parameters are the logit-scale linear predictors at
    those rows (e.g. the curve at predictor quartiles) instead of the raw
    fixed effects.  Block variance parameters are always tracked.
    """

    def __init__(self, spec, contrasts=None, names=None, tol=1e-8, max_iter=500):
        self.spec = spec
        self.contrasts = contrasts
        self.names = names
        self.tol = tol
        self.max_iter = max_iter

    def _summaries(self, state):
        out = []
        if self.contrasts is not None:
            for label, row in self.contrasts:
                row = np.asarray(row, dtype=float)
                out.append(
                    normal_summary(
                        label, float(row @ state.mu_bu),
                        max(float(row @ state.Sigma_bu @ row), 0.0),
                    )
                )
        else:
            names = self.names or [f"beta_{j}" for j in range(self.spec.p)]
            for j in range(self.spec.p):
                out.append(normal_summary(names[j], state.mu_bu[j], state.Sigma_bu[j, j]))
        for ell in range(self.spec.r):
            shape_u = 0.5 * (self.spec.block_sizes[ell] + 1)
            out.append(
                invgamma_summary(
                    f"sigma_sq_u{ell + 1}", shape_u,
                    shape_u / state.mu_recip_sigsq_u[ell],
                )
            )
        return out

    def warm_start(self, y, c):
        res = logistic.fit_batch_logistic(np.asarray(y), np.asarray(c), self.spec,
                                          self.tol, self.max_iter)
        stats = LogisticMoments.from_batch(np.asarray(y, dtype=float), np.asarray(c), res.xi)
        return (res.state, stats), res.converged

    def step(self, ctx, y_new, c_new):
        state, stats = ctx
        return logistic.step_online_logistic(state, stats, int(y_new), c_new, self.spec)

    def summarize(self, ctx):
        state, _ = ctx
        return self._summaries(state)

    def batch_summaries(self, y, c):
        res = logistic.fit_batch_logistic(np.asarray(y), np.asarray(c), self.spec,
                                          self.tol, self.max_iter)
        return self._summaries(res.state), res.converged


class SparseAdapter:
    """Laplace-Zero sparse regression solver surface for the warm-up protocol."""

    def __init__(self, hyper=None, names=None, tol=1e-8, max_iter=500):
        self.hyper = hyper or sparse.SparseHyper()
        self.names = names
        self.tol = tol
        self.max_iter = max_iter

    def _summaries(self, state, stats):
        k = state.k
        names = self.names or ["intercept"] + [f"coef_{j}" for j in range(k)]
        out = [normal_summary(names[0], state.mu_bv[0], state.Sigma_bv[0, 0])]
        mu_v = state.mu_bv[1:]
        sigsq_v = np.diag(state.Sigma_bv)[1:]
        gam = state.mu_gamma
        # Moments of gamma_k * v_k under the factored q-density.
        mean = gam * mu_v
        var = gam * (sigsq_v + mu_v ** 2) - mean ** 2
        for j in range(k):
            out.append(normal_summary(names[j + 1], mean[j], max(var[j], 0.0)))
        shape_eps = 0.5 * (stats.n + 1)
        out.append(
            invgamma_summary("sigma_sq_eps", shape_eps, shape_eps / state.mu_recip_sigsq_eps)
        )
        return out

    def _fit(self, y, z):
        stats = SparseMoments.from_batch(y, z)
        return sparse.fit_stats_sparse(stats, self.hyper, self.tol, self.max_iter), stats

    def warm_start(self, y, z):
        res, stats = self._fit(y, z)
        return (res.state, stats), res.converged

    def step(self, ctx, y_new, z_new):
        state, stats = ctx
        return sparse.step_online_sparse(state, stats, y_new, z_new, self.hyper)

    def summarize(self, ctx):
        state, stats = ctx
        return self._summaries(state, stats)

    def batch_summaries(self, y, z):
        res, stats = self._fit(y, z)
        return self._summaries(res.state, stats), res.converged


def _grid(n_warm: int, n_valid: int) -> np.ndarray:
    interior = n_warm + np.rint(
        np.arange(1, GRID_INTERVALS + 1) * n_valid / GRID_INTERVALS
    ).astype(int)
    return np.concatenate([[n_warm], interior])


def run_warmup_protocol(data, n_warm: int, n_valid: int, adapter) -> DiagnosticTrace:
    """Execute the warm-up tuning protocol on a replayable prefix.

    ``data`` is an iterable of (y, design_row) pairs supplying at least
    n_warm + n_valid observations.  The first grid point anchors the
    batch/online identity: both series are seeded from the same warm-up fit.
    """
    if n_valid < 10:
        raise ValueError(f"n_valid must be at least 10, got {n_valid}")
    records = []
    for rec in data:
        records.append(rec)
        if len(records) == n_warm + n_valid:
            break
    if len(records) < n_warm + n_valid:
        raise ValueError(
            f"stream supplied {len(records)} observations, "
            f"need {n_warm + n_valid}"
        )
    ys = np.array([float(r[0]) for r in records])
    rows = np.array([np.asarray(r[1], dtype=float) for r in records])

    grid = _grid(n_warm, n_valid)
    notes = []
    flagged = False

    ctx, converged = adapter.warm_start(ys[:n_warm], rows[:n_warm])
    if not converged:
        flagged = True
        notes.append(f"warm-up batch fit did not converge at n={n_warm}")

    labels = [s.name for s in adapter.summarize(ctx)]
    n_params = len(labels)
    shape = (grid.shape[0], n_params)
    online = {k: np.empty(shape) for k in ("mean", "q025", "q975")}
    batch = {k: np.empty(shape) for k in ("mean", "q025", "q975")}

    def record(store, g, summaries):
        store["mean"][g] = [s.mean for s in summaries]
        store["q025"][g] = [s.q025 for s in summaries]
        store["q975"][g] = [s.q975 for s in summaries]

    record(online, 0, adapter.summarize(ctx))
    next_grid = 1
    for i in range(n_warm, n_warm + n_valid):
        ctx = adapter.step(ctx, ys[i], rows[i])
        if next_grid < grid.shape[0] and i + 1 == grid[next_grid]:
            record(online, next_grid, adapter.summarize(ctx))
            next_grid += 1

    for g, n in enumerate(grid):
        if g == 0:
            # Identity anchor: the online series was seeded from this fit.
            warm_ctx, _ = adapter.warm_start(ys[:n_warm], rows[:n_warm])
            record(batch, 0, adapter.summarize(warm_ctx))
            continue
        summaries, ok = adapter.batch_summaries(ys[:n], rows[:n])
        if not ok:
            flagged = True
            notes.append(f"batch fit did not converge at n={n}")
        record(batch, g, summaries)

    return DiagnosticTrace(
        sample_sizes=grid,
        labels=labels,
        batch_mean=batch["mean"],
        batch_q025=batch["q025"],
        batch_q975=batch["q975"],
        online_mean=online["mean"],
        online_q025=online["q025"],
        online_q975=online["q975"],
        flagged=flagged,
        notes=notes,
    )


def divergence_score(trace: DiagnosticTrace) -> float:
    """Max over grid points and parameters of |online - batch| mean gap in
    units of the batch 95% interval half-width (floored at 1e-12)."""
    half = np.maximum(0.5 * (trace.batch_q975 - trace.batch_q025), 1e-12)
    return float(np.max(np.abs(trace.online_mean - trace.batch_mean) / half))


def recommend(trace: DiagnosticTrace, threshold: float = DEFAULT_THRESHOLD) -> Recommendation:
    """Accept iff the divergence score is below threshold; otherwise suggest
    doubling the warm-up."""
    score = divergence_score(trace)
    n_warm = int(trace.sample_sizes[0])
    if score < threshold and not trace.flagged:
        return Recommendation("accept", score, n_warm)
    return Recommendation("increase_warmup", score, 2 * n_warm)
