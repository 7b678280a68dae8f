"""Assemble a fitting plan from a run configuration and the warm-up records.

Spline bases, group level sets and (optionally) unit-interval scaling maps
are all frozen from the warm-up prefix; unseen group levels are a hard error
thereafter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .diagnostics import LinRegAdapter, LMMAdapter, LogisticAdapter, SparseAdapter
from .linreg import LinRegHyper
from .lmm import BlockSpec
from .sparse import SparseHyper
from .splines import default_knot_count, make_knots
from .summaries import ParameterSummary, normal_summary

__all__ = ["UnitScaler", "ModelPlan", "build_plan"]


@dataclass(frozen=True)
class UnitScaler:
    """Affine maps x -> (x - lo) / (hi - lo) frozen from warm-up data."""

    lo: dict
    span: dict

    @classmethod
    def fit(cls, records, columns):
        lo, span = {}, {}
        for col in columns:
            vals = np.array([r[col] for r in records], dtype=float)
            lo[col] = float(vals.min())
            width = float(vals.max() - vals.min())
            if width <= 0:
                raise ValueError(f"column {col!r} is constant over the warm-up data")
            span[col] = width
        return cls(lo, span)

    def transform(self, col, value):
        return (value - self.lo[col]) / self.span[col]


@dataclass
class ModelPlan:
    """Frozen row builder, solver adapter and summary conventions for a run."""

    config: RunConfig
    adapter: object
    parameter_names: list
    bases: dict = field(default_factory=dict)  # smooth column -> SplineBasis
    group_levels: dict = field(default_factory=dict)  # group column -> level list
    scaler: UnitScaler | None = None
    spec: BlockSpec | None = None

    def pair(self, record: dict):
        """Map an ingested record to a (response, design_row) pair."""
        y = record[self.config.response]
        if self.config.model == "logistic":
            if y not in (0.0, 1.0):
                raise ValueError(f"binary response must be 0 or 1, got {y}")
            y = int(y)
        elif self.scaler is not None:
            y = self.scaler.transform(self.config.response, y)
        return y, self.row(record)

    def pairs(self, records):
        for rec in records:
            yield self.pair(rec)

    def row(self, record: dict) -> np.ndarray:
        cfg = self.config
        if cfg.model == "sparse":
            return np.array([record[c] for c in cfg.linear], dtype=float)
        parts = [np.ones(1)]
        for col in cfg.linear:
            v = record[col]
            if self.scaler is not None:
                v = self.scaler.transform(col, v)
            parts.append([float(v)])
        for s in cfg.smooth:
            parts.append([float(record[s.name])])
        for s in cfg.smooth:
            parts.append(self.bases[s.name](float(record[s.name])))
        for col in cfg.group:
            levels = self.group_levels[col]
            onehot = np.zeros(len(levels))
            try:
                onehot[levels.index(record[col])] = 1.0
            except ValueError:
                raise ValueError(
                    f"group level {record[col]!r} of column {col!r} was not seen "
                    "during warm-up; the level set is frozen"
                ) from None
            parts.append(onehot)
        return np.concatenate(parts)

    def curve_grid(self, smooth_name: str, n_points: int = 81) -> np.ndarray:
        basis = self.bases[smooth_name]
        return np.linspace(basis.domain_lo, basis.domain_hi, n_points)

    def curve_rows(self, smooth_name: str, grid: np.ndarray) -> np.ndarray:
        """Design rows isolating one smooth component (its linear column plus
        spline block) over a grid, all other columns zero."""
        cfg = self.config
        p_fixed = 1 + len(cfg.linear) + len(cfg.smooth)
        dim = p_fixed + sum(self.bases[s.name].size for s in cfg.smooth) + sum(
            len(self.group_levels[g]) for g in cfg.group
        )
        idx = [s.name for s in cfg.smooth].index(smooth_name)
        lin_col = 1 + len(cfg.linear) + idx
        block_start = p_fixed + sum(
            self.bases[s.name].size for s in cfg.smooth[:idx]
        )
        basis = self.bases[smooth_name]
        rows = np.zeros((grid.shape[0], dim))
        for i, x in enumerate(grid):
            rows[i, lin_col] = x
            rows[i, block_start:block_start + basis.size] = basis(x)
        return rows

    def back_transform(self, summaries, state=None):
        """Map linreg summaries on the unit-interval scale back to original
        units.  Variance summaries scale by the squared response span."""
        if self.scaler is None or self.config.model != "linreg":
            return summaries
        cfg = self.config
        sy = self.scaler.span[cfg.response]
        ly = self.scaler.lo[cfg.response]
        out = []
        # Intercept back-transform mixes all coefficients; use the contrast
        # t0 = sy, tj = -sy * lo_j / span_j against the scaled q-density.
        t = np.zeros(1 + len(cfg.linear))
        t[0] = sy
        for j, col in enumerate(cfg.linear):
            t[j + 1] = -sy * self.scaler.lo[col] / self.scaler.span[col]
        if state is not None:
            mean0 = ly + float(t @ state.mu_beta)
            var0 = float(t @ state.Sigma_beta @ t)
            out.append(normal_summary(summaries[0].name, mean0, var0))
        else:
            out.append(summaries[0])
        for j, col in enumerate(cfg.linear):
            s = summaries[j + 1]
            scale = sy / self.scaler.span[col]
            out.append(
                ParameterSummary(
                    s.name, s.mean * scale, s.sd * abs(scale),
                    min(s.q025 * scale, s.q975 * scale),
                    max(s.q025 * scale, s.q975 * scale),
                )
            )
        for s in summaries[1 + len(cfg.linear):]:
            sq = sy * sy
            out.append(
                ParameterSummary(s.name, s.mean * sq, s.sd * sq, s.q025 * sq, s.q975 * sq)
            )
        return out


def _smooth_knot_count(cfg: RunConfig, smooth) -> int:
    if smooth.knots is not None:
        return smooth.knots
    if cfg.knots is not None:
        return cfg.knots
    return default_knot_count(cfg.n_warm)


def build_plan(cfg: RunConfig, warm_records: list) -> ModelPlan:
    """Freeze bases, groups and scaling from the warm-up records and wire up
    the solver adapter for the configured model."""
    if len(warm_records) < cfg.n_warm:
        raise ValueError(
            f"warm-up needs {cfg.n_warm} records, stream supplied {len(warm_records)}"
        )
    plan = ModelPlan(config=cfg, adapter=None, parameter_names=[])

    if cfg.scaling and cfg.model == "linreg":
        plan.scaler = UnitScaler.fit(
            warm_records[: cfg.n_warm], (cfg.response,) + cfg.linear
        )

    for s in cfg.smooth:
        values = [r[s.name] for r in warm_records[: cfg.n_warm]]
        plan.bases[s.name] = make_knots(values, _smooth_knot_count(cfg, s))
    for col in cfg.group:
        plan.group_levels[col] = sorted(
            {r[col] for r in warm_records[: cfg.n_warm]}
        )

    names = ["intercept"] + list(cfg.linear) + [s.name for s in cfg.smooth]

    if cfg.model == "linreg":
        hyper = LinRegHyper(sigsq_beta=cfg.sigsq_beta, A=cfg.A_eps)
        plan.adapter = LinRegAdapter(hyper, names=names)
        plan.parameter_names = names + ["sigma_sq_eps"]
        return plan

    if cfg.model == "sparse":
        hyper = SparseHyper(
            sigsq_beta=cfg.sigsq_beta, A_u=cfg.A_u, A_eps=cfg.A_eps,
            A_rho=cfg.A_rho, B_rho=cfg.B_rho,
        )
        sparse_names = ["intercept"] + list(cfg.linear)
        plan.adapter = SparseAdapter(hyper, names=sparse_names)
        plan.parameter_names = sparse_names + ["sigma_sq_eps"]
        return plan

    block_sizes = [plan.bases[s.name].size for s in cfg.smooth]
    block_sizes += [len(plan.group_levels[g]) for g in cfg.group]
    spec = BlockSpec(
        p=1 + len(cfg.linear) + len(cfg.smooth),
        block_sizes=tuple(block_sizes),
        sigsq_beta=cfg.sigsq_beta,
        A_eps=cfg.A_eps,
        A_u=tuple(cfg.A_u for _ in block_sizes),
    )
    plan.spec = spec
    variance_names = [f"sigma_sq_u{ell + 1}" for ell in range(spec.r)]
    if cfg.model == "lmm":
        plan.adapter = LMMAdapter(spec, names=names)
        plan.parameter_names = names + ["sigma_sq_eps"] + variance_names
    else:
        plan.adapter = LogisticAdapter(spec, names=names)
        plan.parameter_names = names + variance_names
    return plan
