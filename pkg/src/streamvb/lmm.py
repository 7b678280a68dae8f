"""Batch and online MFVB for the Gaussian linear mixed model.

The coefficient vector stacks p fixed effects followed by r random-effect
blocks of sizes K_1..K_r, each block with its own variance parameter under a
Half-Cauchy prior.  Design rows cover random intercepts (one-hot group
indicator) and penalized-spline additive models.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import spd_inverse
from .splines import SplineBasis, eval_basis
from .suffstats import StreamingMoments
from .summaries import ParameterSummary, invgamma_summary, normal_summary

__all__ = [
    "BlockSpec",
    "LMMState",
    "LMMFitResult",
    "cycle_lmm",
    "step_online_lmm",
    "fit_batch_lmm",
    "fit_stats_lmm",
    "build_row_random_intercept",
    "build_row_additive",
    "additive_design_row",
    "posterior_summary_lmm",
]

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 500


@dataclass(frozen=True)
class BlockSpec:
    """Design layout (p fixed columns, random block sizes) and hyperparameters."""

    p: int
    block_sizes: tuple
    sigsq_beta: float = 1e10
    A_eps: float = 1e5
    A_u: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "block_sizes", tuple(self.block_sizes))
        a_u = tuple(self.A_u) if self.A_u else tuple(1e5 for _ in self.block_sizes)
        object.__setattr__(self, "A_u", a_u)
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if any(k < 1 for k in self.block_sizes):
            raise ValueError("all block sizes must be at least 1")
        if len(a_u) != len(self.block_sizes):
            raise ValueError("A_u length must match the number of blocks")
        if self.sigsq_beta <= 0 or self.A_eps <= 0 or any(a <= 0 for a in a_u):
            raise ValueError("hyperparameters must be strictly positive")

    @property
    def r(self) -> int:
        return len(self.block_sizes)

    @property
    def P(self) -> int:
        return self.p + sum(self.block_sizes)

    def block_slice(self, ell: int) -> slice:
        start = self.p + sum(self.block_sizes[:ell])
        return slice(start, start + self.block_sizes[ell])


@dataclass
class LMMState:
    mu_bu: np.ndarray
    Sigma_bu: np.ndarray
    mu_recip_sigsq_eps: float
    mu_recip_a_eps: float
    mu_recip_sigsq_u: np.ndarray
    mu_recip_a_u: np.ndarray

    @classmethod
    def initial(cls, spec: BlockSpec) -> "LMMState":
        P = spec.P
        return cls(
            mu_bu=np.zeros(P),
            Sigma_bu=np.eye(P),
            mu_recip_sigsq_eps=1.0,
            mu_recip_a_eps=1.0,
            mu_recip_sigsq_u=np.ones(spec.r),
            mu_recip_a_u=np.ones(spec.r),
        )

    def params_vector(self) -> np.ndarray:
        return np.concatenate(
            [
                self.mu_bu,
                [self.mu_recip_sigsq_eps, self.mu_recip_a_eps],
                self.mu_recip_sigsq_u,
                self.mu_recip_a_u,
            ]
        )

    def copy(self) -> "LMMState":
        return LMMState(
            self.mu_bu.copy(),
            self.Sigma_bu.copy(),
            self.mu_recip_sigsq_eps,
            self.mu_recip_a_eps,
            self.mu_recip_sigsq_u.copy(),
            self.mu_recip_a_u.copy(),
        )


def prior_precision_diag(spec: BlockSpec, mu_recip_sigsq_u: np.ndarray) -> np.ndarray:
    """Diagonal of blockdiag{I_p / sigsq_beta, E(1/sigsq_u1) I_K1, ...}."""
    parts = [np.full(spec.p, 1.0 / spec.sigsq_beta)]
    for ell, k in enumerate(spec.block_sizes):
        parts.append(np.full(k, mu_recip_sigsq_u[ell]))
    return np.concatenate(parts)


def cycle_lmm(state: LMMState, stats: StreamingMoments, spec: BlockSpec) -> LMMState:
    """One sweep: Sigma, mu, the error-variance pair, then each block pair."""
    if stats.dim != spec.P:
        raise ValueError(f"stats dim {stats.dim} does not match spec P {spec.P}")
    recip_eps = state.mu_recip_sigsq_eps
    prior_diag = prior_precision_diag(spec, state.mu_recip_sigsq_u)
    sigma = spd_inverse(recip_eps * stats.ctc + np.diag(prior_diag))
    mu = recip_eps * (sigma @ stats.cty)
    mu_recip_a_eps = 1.0 / (recip_eps + spec.A_eps ** -2)
    denom = (
        2.0 * mu_recip_a_eps
        + stats.yty
        - 2.0 * mu @ stats.cty
        + np.trace(stats.ctc @ (sigma + np.outer(mu, mu)))
    )
    mu_recip_sigsq_eps = (stats.n + 1) / denom
    mu_recip_a_u = state.mu_recip_a_u.copy()
    mu_recip_sigsq_u = state.mu_recip_sigsq_u.copy()
    for ell in range(spec.r):
        sl = spec.block_slice(ell)
        mu_recip_a_u[ell] = 1.0 / (mu_recip_sigsq_u[ell] + spec.A_u[ell] ** -2)
        mu_recip_sigsq_u[ell] = (spec.block_sizes[ell] + 1) / (
            2.0 * mu_recip_a_u[ell]
            + float(mu[sl] @ mu[sl])
            + np.trace(sigma[sl, sl])
        )
    return LMMState(mu, sigma, mu_recip_sigsq_eps, mu_recip_a_eps, mu_recip_sigsq_u, mu_recip_a_u)


def step_online_lmm(state: LMMState, stats: StreamingMoments, y_new, c_new, spec: BlockSpec):
    stats.update(y_new, c_new)
    return cycle_lmm(state, stats, spec), stats


@dataclass
class LMMFitResult:
    state: LMMState
    n_iter: int
    converged: bool


def fit_stats_lmm(
    stats: StreamingMoments,
    spec: BlockSpec,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> LMMFitResult:
    """Cycle on frozen statistics until the max relative parameter change
    drops below tol.  Convergence is by parameter change, not ELBO."""
    state = LMMState.initial(spec)
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        new = cycle_lmm(state, stats, spec)
        old_vec = state.params_vector()
        new_vec = new.params_vector()
        denom = max(float(np.max(np.abs(old_vec))), 1e-12)
        state = new
        if float(np.max(np.abs(new_vec - old_vec))) <= tol * denom:
            converged = True
            break
    return LMMFitResult(state, n_iter, converged)


def fit_batch_lmm(
    y: np.ndarray,
    c: np.ndarray,
    spec: BlockSpec,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> LMMFitResult:
    return fit_stats_lmm(StreamingMoments.from_batch(y, c), spec, tol, max_iter)


def build_row_random_intercept(x_new: float, group: int, m: int) -> np.ndarray:
    """Design row [1, x, e_group] with a one-hot m-vector for the group (1-based)."""
    if not 1 <= group <= m:
        raise ValueError(f"group {group} outside the frozen set 1..{m}")
    row = np.zeros(2 + m)
    row[0] = 1.0
    row[1] = x_new
    row[1 + group] = 1.0
    return row


def additive_design_row(smooth_values, bases) -> np.ndarray:
    """Row [1, v_1..v_q, z^1(v_1), ..., z^q(v_q)] for q smooth predictors."""
    smooth_values = list(smooth_values)
    bases = list(bases)
    if len(smooth_values) != len(bases):
        raise ValueError("one basis per smooth predictor required")
    parts = [np.concatenate([[1.0], np.asarray(smooth_values, dtype=float)])]
    for v, basis in zip(smooth_values, bases):
        parts.append(eval_basis(basis, v))
    return np.concatenate(parts)


def build_row_additive(
    s_new: float, t_new: float, basis_s: SplineBasis, basis_t: SplineBasis
) -> np.ndarray:
    """Two-smooth additive design row [1, s, t, z^s(s), z^t(t)]."""
    return additive_design_row([s_new, t_new], [basis_s, basis_t])


def posterior_summary_lmm(
    state: LMMState,
    stats: StreamingMoments,
    spec: BlockSpec,
    names: list[str] | None = None,
) -> list[ParameterSummary]:
    """Fixed-effect Normal summaries plus Inverse-Gamma variance summaries.

    Rates are reconstructed from the stored reciprocal moments: a q-density
    Inverse-Gamma(A, B) has E(1/v) = A/B, so B = A / E(1/v).
    """
    if names is None:
        names = [f"beta_{j}" for j in range(spec.p)]
    out = [
        normal_summary(names[j], state.mu_bu[j], state.Sigma_bu[j, j])
        for j in range(spec.p)
    ]
    shape_eps = 0.5 * (stats.n + 1)
    out.append(
        invgamma_summary("sigma_sq_eps", shape_eps, shape_eps / state.mu_recip_sigsq_eps)
    )
    for ell in range(spec.r):
        shape_u = 0.5 * (spec.block_sizes[ell] + 1)
        out.append(
            invgamma_summary(
                f"sigma_sq_u{ell + 1}", shape_u, shape_u / state.mu_recip_sigsq_u[ell]
            )
        )
    return out
