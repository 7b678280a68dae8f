"""Online and batch MFVB for the Bernoulli-logit mixed model.

The intractable logistic likelihood is lower-bounded by the Jaakkola-Jordan
quadratic family, with one variational scalar xi per observation.  Online
processing computes xi for an arriving row from the current state, folds the
row into the accumulated statistics with that xi frozen forever, and refreshes
the Gaussian factor; this is what makes the method single-pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import spd_inverse
from .lmm import BlockSpec, prior_precision_diag
from .splines import SplineBasis
from .suffstats import LogisticMoments
from .summaries import Z_975

__all__ = [
    "LogisticState",
    "LogisticFitResult",
    "xi_for_row",
    "step_online_logistic",
    "fit_batch_logistic",
    "posterior_curve",
]

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 500


@dataclass
class LogisticState:
    mu_bu: np.ndarray
    Sigma_bu: np.ndarray
    mu_recip_sigsq_u: np.ndarray
    mu_recip_a_u: np.ndarray

    @classmethod
    def initial(cls, spec: BlockSpec) -> "LogisticState":
        sigma = np.diag(1.0 / prior_precision_diag(spec, np.ones(spec.r)))
        return cls(
            mu_bu=np.zeros(spec.P),
            Sigma_bu=sigma,
            mu_recip_sigsq_u=np.ones(spec.r),
            mu_recip_a_u=np.ones(spec.r),
        )

    def params_vector(self) -> np.ndarray:
        return np.concatenate(
            [self.mu_bu, self.mu_recip_sigsq_u, self.mu_recip_a_u]
        )

    def copy(self) -> "LogisticState":
        return LogisticState(
            self.mu_bu.copy(),
            self.Sigma_bu.copy(),
            self.mu_recip_sigsq_u.copy(),
            self.mu_recip_a_u.copy(),
        )


def xi_for_row(state: LogisticState, c_new: np.ndarray) -> float:
    """xi = sqrt(c' {Sigma + mu mu'} c) for one design row."""
    c_new = np.asarray(c_new, dtype=float)
    quad = float(c_new @ state.Sigma_bu @ c_new) + float(c_new @ state.mu_bu) ** 2
    if quad < -1e-12:
        raise ValueError(f"negative xi radicand {quad}")
    return np.sqrt(max(quad, 0.0))


def _refresh_gaussian(stats: LogisticMoments, spec: BlockSpec, mu_recip_sigsq_u: np.ndarray):
    prior_diag = prior_precision_diag(spec, mu_recip_sigsq_u)
    sigma = spd_inverse(2.0 * stats.ct_lam_c + np.diag(prior_diag))
    mu = sigma @ stats.cty_half
    return mu, sigma


def _block_sweep(spec: BlockSpec, mu, sigma, mu_recip_sigsq_u, mu_recip_a_u):
    mu_recip_a_u = mu_recip_a_u.copy()
    mu_recip_sigsq_u = mu_recip_sigsq_u.copy()
    for ell in range(spec.r):
        sl = spec.block_slice(ell)
        mu_recip_a_u[ell] = 1.0 / (mu_recip_sigsq_u[ell] + spec.A_u[ell] ** -2)
        mu_recip_sigsq_u[ell] = (spec.block_sizes[ell] + 1) / (
            2.0 * mu_recip_a_u[ell] + float(mu[sl] @ mu[sl]) + np.trace(sigma[sl, sl])
        )
    return mu_recip_sigsq_u, mu_recip_a_u


def step_online_logistic(
    state: LogisticState,
    stats: LogisticMoments,
    y_new: int,
    c_new: np.ndarray,
    spec: BlockSpec,
):
    """Compute xi from the current state, accumulate with it frozen, then
    refresh the Gaussian factor and sweep the block variance pairs."""
    xi = xi_for_row(state, c_new)
    stats.update(y_new, c_new, xi)
    mu, sigma = _refresh_gaussian(stats, spec, state.mu_recip_sigsq_u)
    mu_recip_sigsq_u, mu_recip_a_u = _block_sweep(
        spec, mu, sigma, state.mu_recip_sigsq_u, state.mu_recip_a_u
    )
    return LogisticState(mu, sigma, mu_recip_sigsq_u, mu_recip_a_u), stats


@dataclass
class LogisticFitResult:
    state: LogisticState
    xi: np.ndarray
    n_iter: int
    converged: bool


def fit_batch_logistic(
    y: np.ndarray,
    c: np.ndarray,
    spec: BlockSpec,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> LogisticFitResult:
    """Full-vector batch scheme: refresh (Sigma, mu) from the current xi
    vector, update the whole xi vector, sweep the block variance pairs,
    until the max relative parameter change drops below tol.

    The converged xi vector is returned so online accumulation can be seeded
    at warm-up handoff.
    """
    y = np.asarray(y, dtype=float)
    c = np.asarray(c, dtype=float)
    if y.shape[0] != c.shape[0]:
        raise ValueError("row counts of y and C disagree")
    state = LogisticState.initial(spec)
    xi = np.array([xi_for_row(state, row) for row in c])
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        stats = LogisticMoments.from_batch(y, c, xi)
        mu, sigma = _refresh_gaussian(stats, spec, state.mu_recip_sigsq_u)
        cs = c @ sigma
        xi = np.sqrt(np.maximum(np.sum(cs * c, axis=1) + (c @ mu) ** 2, 0.0))
        mu_recip_sigsq_u, mu_recip_a_u = _block_sweep(
            spec, mu, sigma, state.mu_recip_sigsq_u, state.mu_recip_a_u
        )
        new = LogisticState(mu, sigma, mu_recip_sigsq_u, mu_recip_a_u)
        old_vec = state.params_vector()
        new_vec = new.params_vector()
        denom = max(float(np.max(np.abs(old_vec))), 1e-12)
        state = new
        if float(np.max(np.abs(new_vec - old_vec))) <= tol * denom:
            converged = True
            break
    return LogisticFitResult(state, xi, n_iter, converged)


def seed_online_stats(y, c, xi) -> LogisticMoments:
    """Warm-up handoff: accumulate C'(y - 1/2) and C'diag{lambda(xi)}C from
    the batch fit's rows and converged xi vector."""
    return LogisticMoments.from_batch(y, c, xi)


def posterior_curve(state: LogisticState, basis: SplineBasis, grid: np.ndarray):
    """Mean and 95% band of the logit-scale curve of the r=1 spline model.

    Design rows are [1, x, z(x)].  Returns (mean, lo, hi) arrays over grid.
    """
    grid = np.asarray(grid, dtype=float)
    mean = np.empty_like(grid)
    half = np.empty_like(grid)
    for i, x in enumerate(grid):
        c = np.concatenate([[1.0, x], basis(x)])
        mean[i] = float(c @ state.mu_bu)
        half[i] = Z_975 * np.sqrt(max(float(c @ state.Sigma_bu @ c), 0.0))
    return mean, mean - half, mean + half
