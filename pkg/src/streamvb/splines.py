"""Truncated-line spline bases with knots frozen at warm-up.

Basis function k is z_k(x) = (x - kappa_k)_+ over a knot set placed at sample
quantiles of the warm-up values.  Values outside the warm-up domain are
clamped to the boundary and counted, rather than raising: a streaming fitter
must tolerate boundary exceedances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["SplineBasis", "make_knots", "eval_basis", "default_knot_count"]


@dataclass
class SplineBasis:
    knots: np.ndarray
    domain_lo: float
    domain_hi: float
    exceedances: int = field(default=0, compare=False)

    def __post_init__(self):
        self.knots = np.asarray(self.knots, dtype=float)
        if self.knots.ndim != 1 or self.knots.size < 1:
            raise ValueError("knots must be a non-empty 1-d array")
        if np.any(np.diff(self.knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if not (self.domain_lo < self.knots[0] and self.knots[-1] < self.domain_hi):
            raise ValueError("knots must lie strictly inside the domain")

    @property
    def size(self) -> int:
        return self.knots.shape[0]

    def clamp(self, x: float) -> float:
        if x < self.domain_lo:
            self.exceedances += 1
            return self.domain_lo
        if x > self.domain_hi:
            self.exceedances += 1
            return self.domain_hi
        return x

    def __call__(self, x: float) -> np.ndarray:
        return eval_basis(self, x)


def make_knots(warmup_values, K: int) -> SplineBasis:
    """Place K knots at the k/(K+1) sample quantiles of the warm-up values."""
    if K < 1:
        raise ValueError("K must be at least 1")
    values = np.asarray(warmup_values, dtype=float)
    if np.unique(values).size < K + 2:
        raise ValueError(
            f"need at least {K + 2} distinct warm-up values for K={K} knots, "
            f"got {np.unique(values).size}"
        )
    probs = np.arange(1, K + 1) / (K + 1)
    knots = np.quantile(values, probs)
    if np.any(np.diff(knots) <= 0):
        raise ValueError("warm-up values too concentrated: knots not distinct")
    lo, hi = float(values.min()), float(values.max())
    if not (lo < knots[0] and knots[-1] < hi):
        raise ValueError("warm-up values too concentrated: knots hit the domain edge")
    return SplineBasis(knots=knots, domain_lo=lo, domain_hi=hi)


def eval_basis(basis: SplineBasis, x: float) -> np.ndarray:
    """Entry k is max(x - kappa_k, 0), after clamping x to the basis domain."""
    x = basis.clamp(float(x))
    return np.maximum(x - basis.knots, 0.0)


def default_knot_count(n_warm: int, cap: int = 35) -> int:
    """Default spline size: min(cap, n_warm // 4), at least 1."""
    return max(1, min(cap, n_warm // 4))
