"""Posterior summary containers shared by the solvers and the CLI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

__all__ = ["Z_975", "ParameterSummary", "normal_summary", "invgamma_summary", "density_grid"]

Z_975 = 1.959963984540054


@dataclass(frozen=True)
class ParameterSummary:
    name: str
    mean: float
    sd: float
    q025: float
    q975: float


def normal_summary(name: str, mean: float, var: float) -> ParameterSummary:
    sd = float(np.sqrt(var))
    return ParameterSummary(name, float(mean), sd, mean - Z_975 * sd, mean + Z_975 * sd)


def invgamma_summary(name: str, shape: float, rate: float) -> ParameterSummary:
    """Summaries of Inverse-Gamma(shape, rate); rate maps to scipy's scale."""
    dist = sps.invgamma(shape, scale=rate)
    mean = rate / (shape - 1.0) if shape > 1.0 else float("inf")
    sd = float(dist.std()) if shape > 2.0 else float("inf")
    return ParameterSummary(
        name, mean, sd, float(dist.ppf(0.025)), float(dist.ppf(0.975))
    )


def density_grid(summary: ParameterSummary, n_points: int = 201):
    """Normal density grid spanning mean +/- 4 SD, as (x, density) arrays."""
    x = np.linspace(summary.mean - 4 * summary.sd, summary.mean + 4 * summary.sd, n_points)
    dens = sps.norm.pdf(x, loc=summary.mean, scale=summary.sd)
    return x, dens
