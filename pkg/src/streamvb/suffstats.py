"""Streaming sufficient-statistic accumulators with exact rank-one updates.

Every solver depends on the data only through a handful of cross products
(y'y, C'y, C'C and the logistic/sparse variants), each of which admits an
exact rank-one update when a new observation arrives.  Accumulators are
single-writer; callers snapshot via ``copy()`` before sharing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .special import lambda_jj

__all__ = ["StreamingMoments", "LogisticMoments", "SparseMoments"]


def _check_dim(vec, dim, name):
    if vec.shape != (dim,):
        raise ValueError(f"{name} has shape {vec.shape}, expected ({dim},)")


@dataclass
class StreamingMoments:
    """Running n, y'y, C'y and C'C for Gaussian-response solvers."""

    n: int
    yty: float
    cty: np.ndarray
    ctc: np.ndarray

    @classmethod
    def zeros(cls, dim: int) -> "StreamingMoments":
        return cls(n=0, yty=0.0, cty=np.zeros(dim), ctc=np.zeros((dim, dim)))

    @classmethod
    def from_batch(cls, y: np.ndarray, c: np.ndarray) -> "StreamingMoments":
        y = np.asarray(y, dtype=float)
        c = np.asarray(c, dtype=float)
        if c.ndim != 2 or y.shape[0] != c.shape[0]:
            raise ValueError(
                f"row counts disagree: y has {y.shape}, C has {c.shape}"
            )
        ctc = c.T @ c
        return cls(
            n=y.shape[0],
            yty=float(y @ y),
            cty=c.T @ y,
            ctc=0.5 * (ctc + ctc.T),
        )

    @property
    def dim(self) -> int:
        return self.cty.shape[0]

    def update(self, y_new: float, c_new: np.ndarray) -> "StreamingMoments":
        c_new = np.asarray(c_new, dtype=float)
        _check_dim(c_new, self.dim, "c_new")
        self.n += 1
        self.yty += y_new * y_new
        self.cty += c_new * y_new
        self.ctc += np.outer(c_new, c_new)
        return self

    def copy(self) -> "StreamingMoments":
        return StreamingMoments(self.n, self.yty, self.cty.copy(), self.ctc.copy())


def update_gaussian(stats: StreamingMoments, y_new: float, c_new) -> StreamingMoments:
    return stats.update(y_new, c_new)


@dataclass
class LogisticMoments:
    """Running n, C'(y - 1/2) and C'diag{lambda(xi)}C for the logistic solver."""

    n: int
    cty_half: np.ndarray
    ct_lam_c: np.ndarray

    @classmethod
    def zeros(cls, dim: int) -> "LogisticMoments":
        return cls(n=0, cty_half=np.zeros(dim), ct_lam_c=np.zeros((dim, dim)))

    @classmethod
    def from_batch(cls, y: np.ndarray, c: np.ndarray, xi: np.ndarray) -> "LogisticMoments":
        y = np.asarray(y, dtype=float)
        c = np.asarray(c, dtype=float)
        xi = np.asarray(xi, dtype=float)
        if y.shape[0] != c.shape[0] or y.shape[0] != xi.shape[0]:
            raise ValueError("row counts of y, C and xi disagree")
        lam = np.array([lambda_jj(x) for x in xi])
        ct_lam_c = c.T @ (lam[:, None] * c)
        return cls(
            n=y.shape[0],
            cty_half=c.T @ (y - 0.5),
            ct_lam_c=0.5 * (ct_lam_c + ct_lam_c.T),
        )

    @property
    def dim(self) -> int:
        return self.cty_half.shape[0]

    def update(self, y_new: int, c_new: np.ndarray, xi_new: float) -> "LogisticMoments":
        if y_new not in (0, 1):
            raise ValueError(f"binary response must be 0 or 1, got {y_new}")
        if xi_new < 0:
            raise ValueError(f"xi must be nonnegative, got {xi_new}")
        c_new = np.asarray(c_new, dtype=float)
        _check_dim(c_new, self.dim, "c_new")
        self.n += 1
        self.cty_half += c_new * (y_new - 0.5)
        self.ct_lam_c += lambda_jj(xi_new) * np.outer(c_new, c_new)
        return self

    def copy(self) -> "LogisticMoments":
        return LogisticMoments(self.n, self.cty_half.copy(), self.ct_lam_c.copy())


def update_logistic(stats, y_new, c_new, xi_new) -> LogisticMoments:
    return stats.update(y_new, c_new, xi_new)


@dataclass
class SparseMoments:
    """Sufficient statistics for the sparse solver, with C = [1 Z].

    ``cty`` and ``ctc`` embed ``zty`` and ``ztz``: the first row/column of the
    C-statistics corresponds to the intercept column of ones, so
    ``cty[1:] == zty`` and ``ctc[1:, 1:] == ztz`` after any update sequence.
    """

    n: int
    yty: float
    zt1: np.ndarray
    zty: np.ndarray
    ztz: np.ndarray
    cty: np.ndarray
    ctc: np.ndarray

    @classmethod
    def zeros(cls, k: int) -> "SparseMoments":
        return cls(
            n=0,
            yty=0.0,
            zt1=np.zeros(k),
            zty=np.zeros(k),
            ztz=np.zeros((k, k)),
            cty=np.zeros(k + 1),
            ctc=np.zeros((k + 1, k + 1)),
        )

    @classmethod
    def from_batch(cls, y: np.ndarray, z: np.ndarray) -> "SparseMoments":
        y = np.asarray(y, dtype=float)
        z = np.asarray(z, dtype=float)
        if z.ndim != 2 or y.shape[0] != z.shape[0]:
            raise ValueError("row counts of y and Z disagree")
        n = y.shape[0]
        c = np.column_stack([np.ones(n), z])
        ztz = z.T @ z
        ctc = c.T @ c
        return cls(
            n=n,
            yty=float(y @ y),
            zt1=z.T @ np.ones(n),
            zty=z.T @ y,
            ztz=0.5 * (ztz + ztz.T),
            cty=c.T @ y,
            ctc=0.5 * (ctc + ctc.T),
        )

    @property
    def k(self) -> int:
        return self.zt1.shape[0]

    def update(self, y_new: float, z_new: np.ndarray) -> "SparseMoments":
        z_new = np.asarray(z_new, dtype=float)
        _check_dim(z_new, self.k, "z_new")
        c_new = np.concatenate([[1.0], z_new])
        self.n += 1
        self.yty += y_new * y_new
        self.zt1 += z_new
        self.zty += z_new * y_new
        self.ztz += np.outer(z_new, z_new)
        self.cty += c_new * y_new
        self.ctc += np.outer(c_new, c_new)
        return self

    def copy(self) -> "SparseMoments":
        return SparseMoments(
            self.n,
            self.yty,
            self.zt1.copy(),
            self.zty.copy(),
            self.ztz.copy(),
            self.cty.copy(),
            self.ctc.copy(),
        )


def update_sparse(stats, y_new, z_new) -> SparseMoments:
    return stats.update(y_new, z_new)
