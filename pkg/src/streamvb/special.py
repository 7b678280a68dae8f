"""Scalar special functions and Inverse-Gamma facts shared by the solvers.

The Inverse-Gamma(A, B) distribution is parameterized with B as a *rate*,
so that E(1/v) = A/B and the density is

    p(v) = B^A / Gamma(A) * v^(-A-1) * exp(-B/v),  v > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "InverseGammaParams",
    "inv_gamma_mean_reciprocal",
    "inv_gamma_log_density",
    "digamma",
    "lambda_jj",
]


@dataclass(frozen=True)
class InverseGammaParams:
    """Shape/rate pair of an Inverse-Gamma distribution."""

    shape: float
    rate: float

    def __post_init__(self):
        if not self.shape > 0:
            raise ValueError(f"shape must be positive, got {self.shape}")
        if not self.rate > 0:
            raise ValueError(f"rate must be positive, got {self.rate}")


def inv_gamma_mean_reciprocal(params: InverseGammaParams) -> float:
    """E(1/v) for v ~ Inverse-Gamma(shape, rate), which equals shape/rate."""
    return params.shape / params.rate


def inv_gamma_log_density(v: float, params: InverseGammaParams) -> float:
    """Log density of Inverse-Gamma(shape, rate) at v > 0."""
    if not v > 0:
        raise ValueError(f"v must be positive, got {v}")
    a, b = params.shape, params.rate
    return a * math.log(b) - math.lgamma(a) - (a + 1.0) * math.log(v) - b / v


# Asymptotic expansion coefficients for psi(x) ~ log x - 1/(2x) - sum B_2k/(2k x^2k).
_DIGAMMA_COEFS = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)

_DIGAMMA_LIFT = 6.0


def digamma(x: float) -> float:
    """Digamma function psi(x) for x > 0.

    Uses the recurrence psi(x+1) = psi(x) + 1/x to lift the argument above 6,
    then an 8-term asymptotic series.  Absolute accuracy is better than 1e-12
    on [1e-3, 1e6].
    """
    if not x > 0:
        raise ValueError(f"digamma requires x > 0, got {x}")
    acc = 0.0
    while x < _DIGAMMA_LIFT:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    term = inv2
    for c in _DIGAMMA_COEFS:
        series += c * term
        term *= inv2
    return acc + math.log(x) - 0.5 / x - series


_LAMBDA_LIMIT_THRESHOLD = 1e-8


def lambda_jj(xi: float) -> float:
    """Jaakkola-Jordan weight tanh(xi/2) / (4 xi).

    Even in xi; the analytic limit 1/8 is returned for |xi| below 1e-8, where
    the Taylor substitute's relative error is O(xi^2).
    """
    xi = abs(xi)
    if xi < _LAMBDA_LIMIT_THRESHOLD:
        return 0.125
    return math.tanh(0.5 * xi) / (4.0 * xi)
