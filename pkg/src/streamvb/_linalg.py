"""Dense symmetric positive-definite inversion with a one-shot jitter guard."""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve

__all__ = ["NumericalError", "spd_inverse"]


class NumericalError(RuntimeError):
    """Raised when a precision matrix cannot be inverted."""


def spd_inverse(mat: np.ndarray) -> np.ndarray:
    """Invert a symmetric positive-definite matrix via Cholesky.

    On factorization failure a single jitter of 1e-10 * mean(diag) is added
    to the diagonal; if that also fails, NumericalError is raised.
    """
    eye = np.eye(mat.shape[0])
    try:
        chol = cho_factor(mat, lower=True)
    except np.linalg.LinAlgError:
        jitter = 1e-10 * float(np.mean(np.diag(mat)))
        try:
            chol = cho_factor(mat + jitter * eye, lower=True)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                f"precision matrix not positive definite (dim {mat.shape[0]}, "
                f"diag range [{np.min(np.diag(mat)):.3g}, {np.max(np.diag(mat)):.3g}])"
            ) from exc
    inv = cho_solve(chol, eye)
    return 0.5 * (inv + inv.T)
