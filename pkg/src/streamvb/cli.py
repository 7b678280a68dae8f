"""Command-line entry points: simulate, diagnose, fit, summarize.

``fit`` streams a delimited file through the online solver after the warm-up
diagnostic accepts, refreshing ``summary.csv`` at a fixed cadence so the
output directory always reflects the latest state.  Figures are rendered
next to each delimited artifact.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from dataclasses import replace

import numpy as np

from . import report, simdata, snapshot
from ._linalg import NumericalError
from .builder import build_plan
from .config import ConfigError, parse_config
from .diagnostics import (
    LinRegAdapter,
    LMMAdapter,
    LogisticAdapter,
    SparseAdapter,
    recommend,
    run_warmup_protocol,
)
from .ingest import CsvStream, IngestError

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_FATAL = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamvb",
        description="Streaming variational Bayes for semiparametric regression.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a seeded simulation CSV")
    sim.add_argument("--scenario", required=True, choices=simdata.SCENARIOS)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--out", default="-", help="output CSV path, - for stdout")
    sim.add_argument("--groups", type=int, default=20,
                     help="group count for random_intercept")
    sim.add_argument("--k", type=int, default=50, help="signal size for sparse_signal")
    sim.add_argument("--active", type=int, default=5,
                     help="planted nonzero count for sparse_signal")
    sim.add_argument("--amplitude", type=float, default=1.0,
                     help="planted coefficient size for sparse_signal")

    for name, descr in (
        ("diagnose", "run the warm-up acceptance protocol only"),
        ("fit", "diagnose, then stream the remaining records online"),
    ):
        cmd = sub.add_parser(name, help=descr)
        cmd.add_argument("--config", required=True, help="run configuration file")
        cmd.add_argument("--input", default="-", help="input CSV path, - for stdin")
        cmd.add_argument("--out", default=None, help="override the output directory")
        cmd.add_argument("--warmup", type=int, default=None, help="override n_warm")
        cmd.add_argument("--validate", type=int, default=None, help="override n_valid")
        cmd.add_argument("--threshold", type=float, default=None,
                         help="override the divergence acceptance threshold")
        if name == "fit":
            cmd.add_argument("--force", action="store_true",
                             help="stream on even if the diagnostic rejects")

    summ = sub.add_parser("summarize", help="recompute summaries from a snapshot")
    summ.add_argument("--snapshot", required=True)
    summ.add_argument("--out", default=".", help="output directory")
    summ.add_argument("--densities", action="store_true")
    return parser


# --- simulate -------------------------------------------------------------

def _sim_stream(args):
    cfg = simdata.SimConfig(seed=args.seed, n=args.n, scenario=args.scenario)
    if args.scenario == "gaussian_additive":
        return ["y", "x1", "x2", "x3", "x4", "x5", "x6"], simdata.gen_gaussian_additive(cfg)
    if args.scenario == "logistic_additive":
        return ["y", "x1", "x2", "x3"], simdata.gen_logistic_additive(cfg)
    if args.scenario == "binary_1d":
        return ["y", "x"], simdata.gen_binary_1d(cfg)
    if args.scenario == "random_intercept":
        return ["y", "x", "group"], simdata.gen_random_intercept(cfg, m=args.groups)
    return (
        ["y"] + [f"z{j + 1}" for j in range(args.k)],
        simdata.gen_sparse_signal(cfg, K=args.k, active=args.active,
                                  amplitude=args.amplitude),
    )


def _cmd_simulate(args) -> int:
    header, stream = _sim_stream(args)
    handle = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8")
    try:
        handle.write(",".join(header) + "\n")
        for row in stream:
            handle.write(",".join(
                str(v) if isinstance(v, int) else repr(float(v)) for v in row
            ) + "\n")
    finally:
        if handle is not sys.stdout:
            handle.close()
    return EXIT_OK


# --- diagnose / fit -------------------------------------------------------

def _load_config(args):
    with open(args.config, encoding="utf-8") as handle:
        cfg = parse_config(handle.read())
    if args.out is not None:
        cfg = replace(cfg, out_dir=args.out)
    if args.warmup is not None:
        cfg = replace(cfg, n_warm=args.warmup)
    if args.validate is not None:
        cfg = replace(cfg, n_valid=args.validate)
    if getattr(args, "threshold", None) is not None:
        cfg = replace(cfg, threshold=args.threshold)
    return cfg.validate()


def _open_stream(cfg, args):
    numeric = tuple(c for c in cfg.all_columns() if c not in cfg.group)
    source = sys.stdin if args.input == "-" else args.input
    return CsvStream(
        source,
        required_columns=cfg.all_columns(),
        numeric_columns=numeric,
        prefix_size=cfg.n_warm + cfg.n_valid,
    )


def _summaries(plan, ctx):
    out = plan.adapter.summarize(ctx)
    return plan.back_transform(out, state=ctx[0])


def _density_spec(plan, name, state, stats):
    """(kind, shape, rate) for one parameter's marginal density."""
    if not name.startswith("sigma_sq"):
        return "normal", None, None
    model = plan.config.model
    scale = 1.0
    if plan.scaler is not None:
        scale = plan.scaler.span[plan.config.response] ** 2
    if name == "sigma_sq_eps":
        shape = 0.5 * (stats.n + 1)
        recip = state.mu_recip_sigsq if model == "linreg" else state.mu_recip_sigsq_eps
        return "invgamma", shape, scale * shape / recip
    ell = int(name.rsplit("u", 1)[1]) - 1
    shape = 0.5 * (plan.spec.block_sizes[ell] + 1)
    return "invgamma", shape, shape / state.mu_recip_sigsq_u[ell]


def _write_densities(out_dir, plan, ctx, summaries):
    state, stats = ctx
    for summary in summaries:
        kind, shape, rate = _density_spec(plan, summary.name, state, stats)
        if kind == "normal" and not np.isfinite(summary.sd):
            continue
        base = os.path.join(out_dir, f"density_{summary.name}")
        x, dens = report.write_density(base + ".csv", summary, kind, shape, rate)
        report.plot_density(base + ".png", summary, x, dens)


def _write_curves(out_dir, plan, state):
    if not plan.config.smooth or plan.config.model not in ("lmm", "logistic"):
        return
    from .summaries import Z_975

    curves = {}
    for smooth in plan.config.smooth:
        grid = plan.curve_grid(smooth.name)
        rows = plan.curve_rows(smooth.name, grid)
        mean = rows @ state.mu_bu
        half = Z_975 * np.sqrt(
            np.maximum(np.sum((rows @ state.Sigma_bu) * rows, axis=1), 0.0)
        )
        curves[smooth.name] = (grid, mean, mean - half, mean + half)
    report.write_curve(os.path.join(out_dir, "curve.csv"), curves)
    ylabel = "logit-scale effect" if plan.config.model == "logistic" else "effect"
    report.plot_curve(os.path.join(out_dir, "curve.png"), curves, ylabel)


def _write_diagnostic(out_dir, trace, rec):
    report.write_trace(os.path.join(out_dir, "trace.csv"), trace)
    report.plot_trace(os.path.join(out_dir, "trace.png"), trace)
    rows = [("decision", rec.decision), ("score", repr(rec.score)),
            ("suggested_n_warm", rec.suggested_n_warm)]
    rows += [("note", note) for note in trace.notes]
    report.atomic_write_csv(os.path.join(out_dir, "diagnostic.csv"),
                            ["key", "value"], rows)


def _run_protocol(cfg, args):
    os.makedirs(cfg.out_dir, exist_ok=True)
    stream = _open_stream(cfg, args)
    prefix = stream.prefix()
    plan = build_plan(cfg, prefix)
    trace = run_warmup_protocol(plan.pairs(prefix), cfg.n_warm, cfg.n_valid,
                                plan.adapter)
    rec = recommend(trace, cfg.threshold)
    _write_diagnostic(cfg.out_dir, trace, rec)
    print(
        f"diagnostic: {rec.decision} (score {rec.score:.3g}, threshold "
        f"{cfg.threshold:g}, suggested n_warm {rec.suggested_n_warm})"
    )
    return stream, prefix, plan, rec


def _cmd_diagnose(args) -> int:
    cfg = _load_config(args)
    stream, _, _, rec = _run_protocol(cfg, args)
    stream.close()
    return EXIT_OK if rec.decision == "accept" else EXIT_REJECTED


def _cmd_fit(args) -> int:
    cfg = _load_config(args)
    stream, prefix, plan, rec = _run_protocol(cfg, args)
    if rec.decision != "accept" and not args.force:
        print("fit aborted: diagnostic recommends a larger warm-up "
              "(rerun with --force to stream anyway)", file=sys.stderr)
        stream.close()
        return EXIT_REJECTED

    warm = prefix[: cfg.n_warm]
    ys = np.array([plan.pair(r)[0] for r in warm], dtype=float)
    rows = np.array([plan.pair(r)[1] for r in warm])
    ctx, _ = plan.adapter.warm_start(ys, rows)

    summary_path = os.path.join(cfg.out_dir, "summary.csv")
    n_seen = cfg.n_warm

    def flush():
        report.write_summary(summary_path, _summaries(plan, ctx), n_seen=n_seen)

    for record in itertools.chain(prefix[cfg.n_warm:], stream.tail()):
        y, c = plan.pair(record)
        ctx = plan.adapter.step(ctx, y, c)
        n_seen += 1
        if n_seen % cfg.cadence == 0:
            flush()
    stream.close()

    state, stats = ctx
    summaries = _summaries(plan, ctx)
    report.write_summary(summary_path, summaries, n_seen=n_seen)
    _write_curves(cfg.out_dir, plan, state)
    if cfg.densities:
        _write_densities(cfg.out_dir, plan, ctx, summaries)
    snapshot.save_snapshot(
        os.path.join(cfg.out_dir, "snapshot.npz"),
        cfg.model, plan.adapter.names, state, stats,
        spec=plan.spec,
        hyper=plan.adapter.hyper if cfg.model == "sparse" else None,
    )
    exceeded = sum(b.exceedances for b in plan.bases.values())
    tail_note = f", {exceeded} domain exceedances" if exceeded else ""
    print(f"fit complete: {n_seen} records, {stream.skipped} skipped{tail_note}")
    return EXIT_OK


# --- summarize ------------------------------------------------------------

def _adapter_for(model, names, extra):
    if model == "linreg":
        return LinRegAdapter(names=names)
    if model == "lmm":
        return LMMAdapter(extra, names=names)
    if model == "logistic":
        return LogisticAdapter(extra, names=names)
    return SparseAdapter(extra, names=names)


def _cmd_summarize(args) -> int:
    model, names, state, stats, extra = snapshot.load_snapshot(args.snapshot)
    os.makedirs(args.out, exist_ok=True)
    adapter = _adapter_for(model, names, extra)
    summaries = adapter.summarize((state, stats))
    report.write_summary(os.path.join(args.out, "summary.csv"), summaries,
                         n_seen=stats.n)
    if args.densities:
        from .summaries import density_grid

        for summary in summaries:
            if not np.isfinite(summary.sd):
                continue
            base = os.path.join(args.out, f"density_{summary.name}")
            x, dens = density_grid(summary)
            report.atomic_write_csv(base + ".csv", ["value", "density"],
                                    zip(x, dens))
            report.plot_density(base + ".png", summary, x, dens)
    for summary in summaries:
        print(f"{summary.name}: mean {summary.mean:.6g} "
              f"[{summary.q025:.6g}, {summary.q975:.6g}]")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "diagnose": _cmd_diagnose,
        "fit": _cmd_fit,
        "summarize": _cmd_summarize,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, IngestError, NumericalError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
