"""Delimited report writers plus matplotlib renderings of the same artifacts.

Every CSV is written atomically (temp file then rename) so a reader polling
the output directory of a live streaming fit never sees a torn file.  Floats
are written with ``repr`` fidelity, which round-trips exactly.
"""

from __future__ import annotations

import csv
import os
import tempfile

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from scipy import stats as sps  # noqa: E402

from .diagnostics import DiagnosticTrace  # noqa: E402
from .summaries import ParameterSummary, density_grid  # noqa: E402

__all__ = [
    "atomic_write_csv",
    "write_summary",
    "write_trace",
    "write_curve",
    "write_density",
    "plot_trace",
    "plot_curve",
    "plot_density",
]


def _fmt(value):
    return repr(float(value)) if isinstance(value, (float, np.floating)) else value


def atomic_write_csv(path: str, header, rows):
    """Write header + rows to path via a same-directory temp file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_summary(path: str, summaries: list, n_seen: int | None = None):
    header = ["parameter", "mean", "sd", "q025", "q975"]
    rows = [(s.name, s.mean, s.sd, s.q025, s.q975) for s in summaries]
    if n_seen is not None:
        header.append("n_seen")
        rows = [row + (n_seen,) for row in rows]
    atomic_write_csv(path, header, rows)


def write_trace(path: str, trace: DiagnosticTrace):
    atomic_write_csv(
        path, ["n", "parameter", "series", "mean", "q025", "q975"], trace.rows()
    )


def write_curve(path: str, curves: dict):
    """``curves`` maps a smooth label to (grid, mean, lo, hi) arrays."""
    rows = []
    for label, (grid, mean, lo, hi) in curves.items():
        for i in range(len(grid)):
            rows.append((label, grid[i], mean[i], lo[i], hi[i]))
    atomic_write_csv(path, ["smooth", "x", "mean", "q025", "q975"], rows)


def _density_points(summary: ParameterSummary, kind: str, shape=None, rate=None):
    if kind == "invgamma":
        dist = sps.invgamma(shape, scale=rate)
        x = np.linspace(dist.ppf(1e-4), dist.ppf(1.0 - 1e-4), 201)
        return x, dist.pdf(x)
    return density_grid(summary)


def write_density(path: str, summary: ParameterSummary, kind="normal", shape=None, rate=None):
    x, dens = _density_points(summary, kind, shape, rate)
    atomic_write_csv(path, ["value", "density"], zip(x, dens))
    return x, dens


def plot_trace(path: str, trace: DiagnosticTrace, max_panels: int = 12):
    """Batch vs online trajectories with batch 95% bands, one panel per
    tracked parameter (capped at max_panels)."""
    labels = trace.labels[:max_panels]
    n = len(labels)
    cols = min(3, n)
    rows = (n + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(4.0 * cols, 2.8 * rows), squeeze=False)
    for j, label in enumerate(labels):
        ax = axes[j // cols][j % cols]
        ax.fill_between(
            trace.sample_sizes, trace.batch_q025[:, j], trace.batch_q975[:, j],
            alpha=0.25, label="batch 95%",
        )
        ax.plot(trace.sample_sizes, trace.batch_mean[:, j], label="batch")
        ax.plot(trace.sample_sizes, trace.online_mean[:, j], "--", label="online")
        ax.set_title(label, fontsize=9)
        ax.set_xlabel("n")
    axes[0][0].legend(fontsize=7)
    for j in range(n, rows * cols):
        axes[j // cols][j % cols].axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_curve(path: str, curves: dict, ylabel: str = "effect"):
    n = len(curves)
    fig, axes = plt.subplots(1, n, figsize=(4.5 * n, 3.2), squeeze=False)
    for ax, (label, (grid, mean, lo, hi)) in zip(axes[0], curves.items()):
        ax.fill_between(grid, lo, hi, alpha=0.25)
        ax.plot(grid, mean)
        ax.set_title(label, fontsize=10)
        ax.set_xlabel(label)
        ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_density(path: str, summary: ParameterSummary, x, dens):
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.plot(x, dens)
    ax.axvline(summary.mean, linestyle="--", linewidth=0.8)
    ax.set_title(summary.name, fontsize=10)
    ax.set_xlabel(summary.name)
    ax.set_ylabel("density")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
