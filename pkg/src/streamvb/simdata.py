"""Seeded generators reproducing the simulation settings used for tests
and demos.

All generators draw sequentially from a PCG64 stream fixed by the seed, so a
given (seed, record index) pair is reproducible by replaying the stream from
the start; replayable prefixes are what the warm-up diagnostic protocol
requires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

__all__ = [
    "SimConfig",
    "SCENARIOS",
    "f4_gauss",
    "f5_gauss",
    "f6_gauss",
    "f2_logit",
    "f3_logit",
    "binary_1d_probability",
    "gen_gaussian_additive",
    "gen_logistic_additive",
    "gen_binary_1d",
    "gen_random_intercept",
    "gen_sparse_signal",
]

SCENARIOS = (
    "gaussian_additive",
    "logistic_additive",
    "binary_1d",
    "random_intercept",
    "sparse_signal",
)


@dataclass(frozen=True)
class SimConfig:
    seed: int
    n: int
    scenario: str

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")


def _std_normal_cdf(t: float) -> float:
    return 0.5 * (1.0 + math.erf(t / math.sqrt(2.0)))


def f4_gauss(x: float) -> float:
    return 2.0 * _std_normal_cdf(6.0 * x - 3.0)


def f5_gauss(x: float) -> float:
    return math.sin(3.0 * math.pi * x ** 3)


def f6_gauss(x: float) -> float:
    return math.cos(4.0 * math.pi * x)


def f2_logit(x: float) -> float:
    return math.cos(4.0 * math.pi * x) + 2.0 * x


def f3_logit(x: float) -> float:
    return math.sin(2.0 * math.pi * x ** 2)


def _logistic(eta: float) -> float:
    if eta >= 0:
        return 1.0 / (1.0 + math.exp(-eta))
    ex = math.exp(eta)
    return ex / (1.0 + ex)


def binary_1d_probability(x: float) -> float:
    """Success probability logit^{-1}(cos(4 pi x) + 2 x - 1)."""
    return _logistic(math.cos(4.0 * math.pi * x) + 2.0 * x - 1.0)


def gen_gaussian_additive(cfg: SimConfig) -> Iterator[tuple]:
    """Yield (y, x1..x6): three Bernoulli(1/2) linear effects with
    coefficients (0.2, -0.3, 0.6) plus three smooth N(0,1) effects,
    unit error variance."""
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.n):
        x123 = rng.binomial(1, 0.5, size=3).astype(float)
        x456 = rng.standard_normal(3)
        mean = (
            0.2 * x123[0]
            - 0.3 * x123[1]
            + 0.6 * x123[2]
            + f4_gauss(x456[0])
            + f5_gauss(x456[1])
            + f6_gauss(x456[2])
        )
        y = mean + rng.standard_normal()
        yield (y, *x123, *x456)


def gen_logistic_additive(cfg: SimConfig) -> Iterator[tuple]:
    """Yield (y, x1..x3): Bernoulli labels from a logit-linear predictor
    0.2 x1 + f2(x2) + f3(x3)."""
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.n):
        x1 = float(rng.binomial(1, 0.5))
        x2, x3 = rng.standard_normal(2)
        prob = _logistic(0.2 * x1 + f2_logit(x2) + f3_logit(x3))
        y = int(rng.random() < prob)
        yield (y, x1, x2, x3)


def gen_binary_1d(cfg: SimConfig) -> Iterator[tuple]:
    """Yield (y, x) with x ~ Uniform(0,1) and the 1-d binary truth."""
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.n):
        x = rng.random()
        y = int(rng.random() < binary_1d_probability(x))
        yield (y, x)


def gen_random_intercept(
    cfg: SimConfig,
    m: int,
    beta: tuple = (0.3, 0.7),
    sig_u: float = 0.5,
    sig_eps: float = 0.4,
) -> Iterator[tuple]:
    """Yield (y, x, group) with group-specific intercepts fixed for the
    stream's life; groups are drawn uniformly from 1..m."""
    if m < 1:
        raise ValueError("m must be at least 1")
    rng = np.random.default_rng(cfg.seed)
    intercepts = sig_u * rng.standard_normal(m)
    b0, b1 = beta
    for _ in range(cfg.n):
        group = int(rng.integers(1, m + 1))
        x = rng.random()
        y = b0 + intercepts[group - 1] + b1 * x + sig_eps * rng.standard_normal()
        yield (y, x, group)


def gen_sparse_signal(
    cfg: SimConfig,
    K: int,
    active: int,
    amplitude: float,
) -> Iterator[tuple]:
    """Yield (y, z_1..z_K) with exactly `active` coefficients of the given
    amplitude (positions fixed by the seed), Gaussian design and unit noise."""
    if active > K:
        raise ValueError(f"active ({active}) cannot exceed K ({K})")
    rng = np.random.default_rng(cfg.seed)
    coefs = np.zeros(K)
    positions = rng.choice(K, size=active, replace=False)
    coefs[positions] = amplitude
    for _ in range(cfg.n):
        z = rng.standard_normal(K)
        y = float(z @ coefs) + rng.standard_normal()
        yield (y, *z)


def active_positions(cfg: SimConfig, K: int, active: int) -> np.ndarray:
    """Positions of the planted nonzero coefficients for the given config."""
    rng = np.random.default_rng(cfg.seed)
    return np.sort(rng.choice(K, size=active, replace=False))
