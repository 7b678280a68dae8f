"""Batch and online MFVB for Bayesian Gaussian linear regression.

The model places a zero-mean Gaussian prior on the coefficients and a
Half-Cauchy prior (via the Inverse-Gamma auxiliary representation) on the
error standard deviation.  The optimal q-densities are a Gaussian for the
coefficients and Inverse-Gammas for the variance and its auxiliary, and
coordinate ascent over their parameters maximizes an explicit evidence
lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._linalg import spd_inverse
from .suffstats import StreamingMoments
from .summaries import ParameterSummary, invgamma_summary, normal_summary

__all__ = [
    "LinRegHyper",
    "LinRegState",
    "FitResult",
    "cycle",
    "elbo",
    "fit_batch",
    "fit_stats",
    "step_online",
    "posterior_summary",
]

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 500


@dataclass(frozen=True)
class LinRegHyper:
    """Prior coefficient variance and Half-Cauchy scale of the error SD."""

    sigsq_beta: float = 1e10
    A: float = 1e5

    def __post_init__(self):
        if not self.sigsq_beta > 0 or not self.A > 0:
            raise ValueError("hyperparameters must be strictly positive")


@dataclass
class LinRegState:
    mu_beta: np.ndarray
    Sigma_beta: np.ndarray
    mu_recip_sigsq: float
    mu_recip_a: float

    @classmethod
    def initial(cls, p: int, hyper: LinRegHyper) -> "LinRegState":
        return cls(
            mu_beta=np.zeros(p),
            Sigma_beta=hyper.sigsq_beta * np.eye(p),
            mu_recip_sigsq=1.0,
            mu_recip_a=1.0,
        )

    @property
    def p(self) -> int:
        return self.mu_beta.shape[0]

    def params_vector(self) -> np.ndarray:
        return np.concatenate([self.mu_beta, [self.mu_recip_sigsq, self.mu_recip_a]])

    def copy(self) -> "LinRegState":
        return LinRegState(
            self.mu_beta.copy(), self.Sigma_beta.copy(),
            self.mu_recip_sigsq, self.mu_recip_a,
        )


def cycle(state: LinRegState, stats: StreamingMoments, hyper: LinRegHyper) -> LinRegState:
    """One coordinate-ascent sweep: Sigma, mu, E(1/a), E(1/sigma^2)."""
    if stats.dim != state.p:
        raise ValueError(f"stats dim {stats.dim} does not match state dim {state.p}")
    p = state.p
    recip = state.mu_recip_sigsq
    sigma = spd_inverse(recip * stats.ctc + np.eye(p) / hyper.sigsq_beta)
    mu = recip * (sigma @ stats.cty)
    mu_recip_a = 1.0 / (recip + hyper.A ** -2)
    denom = (
        2.0 * mu_recip_a
        + stats.yty
        - 2.0 * mu @ stats.cty
        + np.trace(stats.ctc @ (sigma + np.outer(mu, mu)))
    )
    mu_recip_sigsq = (stats.n + 1) / denom
    return LinRegState(mu, sigma, mu_recip_sigsq, mu_recip_a)


def elbo(state: LinRegState, stats: StreamingMoments, hyper: LinRegHyper) -> float:
    """Explicit marginal log-likelihood lower bound, term by term."""
    n, p = stats.n, state.p
    sign, logdet = np.linalg.slogdet(state.Sigma_beta)
    if sign <= 0:
        raise ValueError("Sigma_beta must be positive definite")
    return (
        0.5 * p
        - 0.5 * n * math.log(2.0 * math.pi)
        - 2.0 * math.log(math.pi)
        + math.lgamma(0.5 * (n + 1))
        - 0.5 * p * math.log(hyper.sigsq_beta)
        - math.log(hyper.A)
        - (float(state.mu_beta @ state.mu_beta) + np.trace(state.Sigma_beta))
        / (2.0 * hyper.sigsq_beta)
        + 0.5 * logdet
        - 0.5 * (n + 1) * math.log((n + 1) / (2.0 * state.mu_recip_sigsq))
        - math.log(state.mu_recip_sigsq + hyper.A ** -2)
        + state.mu_recip_sigsq * state.mu_recip_a
    )


@dataclass
class FitResult:
    """Outcome of an iterative batch fit; non-convergence is flagged, not fatal."""

    state: LinRegState
    n_iter: int
    converged: bool
    final_elbo: float | None = None
    xi: np.ndarray | None = None
    elbo_trace: list = field(default_factory=list)


def fit_stats(
    stats: StreamingMoments,
    hyper: LinRegHyper,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> FitResult:
    """Iterate coordinate-ascent sweeps on frozen statistics until the
    relative ELBO increase drops below tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    state = LinRegState.initial(stats.dim, hyper)
    trace = []
    prev = -np.inf
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        state = cycle(state, stats, hyper)
        bound = elbo(state, stats, hyper)
        trace.append(bound)
        if np.isfinite(prev) and abs(bound - prev) <= tol * max(1.0, abs(prev)):
            converged = True
            break
        prev = bound
    return FitResult(state, n_iter, converged, trace[-1], elbo_trace=trace)


def fit_batch(
    y: np.ndarray,
    x: np.ndarray,
    hyper: LinRegHyper,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> FitResult:
    return fit_stats(StreamingMoments.from_batch(y, x), hyper, tol, max_iter)


def step_online(
    state: LinRegState,
    stats: StreamingMoments,
    y_new: float,
    x_new: np.ndarray,
    hyper: LinRegHyper,
):
    """Accumulate one observation, then apply exactly one sweep."""
    stats.update(y_new, x_new)
    return cycle(state, stats, hyper), stats


def posterior_summary(
    state: LinRegState,
    stats: StreamingMoments,
    names: list[str] | None = None,
) -> list[ParameterSummary]:
    """Per-coefficient Normal summaries plus the Inverse-Gamma error-variance
    summary with shape (n+1)/2 and rate (n+1)/(2 E(1/sigma^2))."""
    if names is None:
        names = [f"beta_{j}" for j in range(state.p)]
    out = [
        normal_summary(names[j], state.mu_beta[j], state.Sigma_beta[j, j])
        for j in range(state.p)
    ]
    n = stats.n
    out.append(
        invgamma_summary("sigma_sq_eps", 0.5 * (n + 1), (n + 1) / (2.0 * state.mu_recip_sigsq))
    )
    return out
