"""Online and batch MFVB for sparse signal regression with a Laplace-Zero prior.

The spike-and-slab prior on each coefficient is handled through auxiliary
variables: a Bernoulli inclusion indicator gamma_k (with Beta-distributed
inclusion probability), a positive scale b_k, and the slab value v_k.  The
coefficient vector of the working Gaussian factor stacks the intercept and v.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import spd_inverse
from .special import digamma
from .suffstats import SparseMoments

__all__ = [
    "SparseHyper",
    "SparseState",
    "SparseFitResult",
    "cycle_sparse",
    "step_online_sparse",
    "fit_batch_sparse",
    "fit_stats_sparse",
]

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 500

_GAMMA_CLAMP = 1e-12


def _safe_logistic(eta: np.ndarray) -> np.ndarray:
    """Overflow-safe elementwise logistic."""
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    ex = np.exp(eta[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass(frozen=True)
class SparseHyper:
    sigsq_beta: float = 1e10
    A_u: float = 1e5
    A_eps: float = 1e5
    A_rho: float = 1.0
    B_rho: float = 1.0

    def __post_init__(self):
        for name in ("sigsq_beta", "A_u", "A_eps", "A_rho", "B_rho"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass
class SparseState:
    mu_bv: np.ndarray
    Sigma_bv: np.ndarray
    mu_b: np.ndarray
    mu_gamma: np.ndarray
    mu_w: np.ndarray
    Omega_w: np.ndarray
    mu_recip_sigsq_u: float
    mu_recip_sigsq_eps: float
    mu_recip_a_u: float
    mu_recip_a_eps: float
    clamp_events: int = 0

    @classmethod
    def initial(cls, k: int) -> "SparseState":
        mu_gamma = np.full(k, 0.5)
        mu_w = np.concatenate([[1.0], mu_gamma])
        return cls(
            mu_bv=np.zeros(k + 1),
            Sigma_bv=np.eye(k + 1),
            mu_b=np.ones(k),
            mu_gamma=mu_gamma,
            mu_w=mu_w,
            Omega_w=omega_from_w(mu_w),
            mu_recip_sigsq_u=1.0,
            mu_recip_sigsq_eps=1.0,
            mu_recip_a_u=1.0,
            mu_recip_a_eps=1.0,
        )

    @property
    def k(self) -> int:
        return self.mu_gamma.shape[0]

    def params_vector(self) -> np.ndarray:
        return np.concatenate(
            [
                self.mu_bv,
                self.mu_b,
                self.mu_gamma,
                [
                    self.mu_recip_sigsq_u,
                    self.mu_recip_sigsq_eps,
                    self.mu_recip_a_u,
                    self.mu_recip_a_eps,
                ],
            ]
        )

    def copy(self) -> "SparseState":
        return SparseState(
            self.mu_bv.copy(),
            self.Sigma_bv.copy(),
            self.mu_b.copy(),
            self.mu_gamma.copy(),
            self.mu_w.copy(),
            self.Omega_w.copy(),
            self.mu_recip_sigsq_u,
            self.mu_recip_sigsq_eps,
            self.mu_recip_a_u,
            self.mu_recip_a_eps,
            self.clamp_events,
        )


def omega_from_w(w: np.ndarray) -> np.ndarray:
    """Second-moment matrix diag{w (1 - w)} + w w' of independent Bernoullis."""
    return np.diag(w * (1.0 - w)) + np.outer(w, w)


def cycle_sparse(state: SparseState, stats: SparseMoments, hyper: SparseHyper) -> SparseState:
    """One full sweep of the sparse coordinate-ascent updates, in printed order."""
    k = state.k
    if stats.k != k:
        raise ValueError(f"stats K {stats.k} does not match state K {k}")

    prior_diag = np.concatenate(
        [[1.0 / hyper.sigsq_beta], state.mu_recip_sigsq_u * state.mu_b]
    )
    sigma = spd_inverse(
        state.mu_recip_sigsq_eps * (stats.ctc * state.Omega_w) + np.diag(prior_diag)
    )
    mu = state.mu_recip_sigsq_eps * (sigma @ (state.mu_w * stats.cty))

    sigsq_v = np.diag(sigma)[1:].copy()
    mu_v = mu[1:]
    mu_b = (state.mu_recip_sigsq_u * (sigsq_v + mu_v ** 2)) ** -0.5

    ztz_diag = np.diag(stats.ztz)
    sigma_v = sigma[1:, 1:]
    cross = sigma[0, 1:]
    eta = (
        -0.5
        * state.mu_recip_sigsq_eps
        * (
            ztz_diag * (sigsq_v + mu_v ** 2)
            - 2.0 * stats.zty * mu_v
            + 2.0 * stats.zt1 * (cross + mu[0] * mu_v)
            + 2.0 * np.diag(stats.ztz @ (state.mu_gamma[:, None] * sigma_v))
            - 2.0 * ztz_diag * state.mu_gamma * sigsq_v
            + 2.0
            * mu_v
            * (stats.ztz @ (state.mu_gamma * mu_v) - ztz_diag * state.mu_gamma * mu_v)
        )
        + digamma(hyper.A_rho + float(np.sum(state.mu_gamma)))
        - digamma(hyper.B_rho + k - float(np.sum(state.mu_gamma)))
    )
    mu_gamma = _safe_logistic(eta)
    clamp_events = state.clamp_events
    clipped = np.clip(mu_gamma, _GAMMA_CLAMP, 1.0 - _GAMMA_CLAMP)
    clamp_events += int(np.sum(clipped != mu_gamma))
    mu_gamma = clipped

    mu_w = np.concatenate([[1.0], mu_gamma])
    omega = omega_from_w(mu_w)

    mu_recip_a_eps = 1.0 / (state.mu_recip_sigsq_eps + hyper.A_eps ** -2)
    mu_recip_a_u = 1.0 / (state.mu_recip_sigsq_u + hyper.A_u ** -2)

    b_eps = (
        mu_recip_a_eps
        + 0.5 * stats.yty
        - float((mu_w * mu) @ stats.cty)
        + 0.5 * np.trace(stats.ctc @ (omega * (sigma + np.outer(mu, mu))))
    )
    b_u = mu_recip_a_u + 0.5 * float(mu_b @ (sigsq_v + mu_v ** 2))

    mu_recip_sigsq_u = 0.5 * (k + 1) / b_u
    mu_recip_sigsq_eps = 0.5 * (stats.n + 1) / b_eps

    return SparseState(
        mu, sigma, mu_b, mu_gamma, mu_w, omega,
        mu_recip_sigsq_u, mu_recip_sigsq_eps,
        mu_recip_a_u, mu_recip_a_eps, clamp_events,
    )


def step_online_sparse(state: SparseState, stats: SparseMoments, y_new, z_new, hyper: SparseHyper):
    stats.update(y_new, z_new)
    return cycle_sparse(state, stats, hyper), stats


@dataclass
class SparseFitResult:
    state: SparseState
    n_iter: int
    converged: bool


def fit_stats_sparse(
    stats: SparseMoments,
    hyper: SparseHyper,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SparseFitResult:
    """Cycle on frozen batch statistics until the max relative parameter
    change drops below tol."""
    state = SparseState.initial(stats.k)
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        new = cycle_sparse(state, stats, hyper)
        old_vec = state.params_vector()
        new_vec = new.params_vector()
        denom = max(float(np.max(np.abs(old_vec))), 1e-12)
        state = new
        if float(np.max(np.abs(new_vec - old_vec))) <= tol * denom:
            converged = True
            break
    return SparseFitResult(state, n_iter, converged)


def fit_batch_sparse(
    y: np.ndarray,
    z: np.ndarray,
    hyper: SparseHyper,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SparseFitResult:
    return fit_stats_sparse(SparseMoments.from_batch(y, z), hyper, tol, max_iter)
