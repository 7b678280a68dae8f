"""Versioned binary snapshots of a fit's state and accumulated statistics.

A snapshot captures everything needed to resume online updates or recompute
posterior summaries later: the variational state, the sufficient statistics,
the model layout and the parameter names.  Stored with ``np.savez``; a flat
CSV mirror of every array entry is written next to it for human inspection.
"""

from __future__ import annotations

import csv
import os

import numpy as np

from .lmm import BlockSpec, LMMState
from .linreg import LinRegState
from .logistic import LogisticState
from .sparse import SparseHyper, SparseState
from .suffstats import LogisticMoments, SparseMoments, StreamingMoments

__all__ = ["SNAPSHOT_VERSION", "save_snapshot", "load_snapshot"]

SNAPSHOT_VERSION = 1


def _state_arrays(model, state):
    if model in ("linreg",):
        return {
            "mu_beta": state.mu_beta,
            "Sigma_beta": state.Sigma_beta,
            "mu_recip_sigsq": state.mu_recip_sigsq,
            "mu_recip_a": state.mu_recip_a,
        }
    if model == "lmm":
        return {
            "mu_bu": state.mu_bu,
            "Sigma_bu": state.Sigma_bu,
            "mu_recip_sigsq_eps": state.mu_recip_sigsq_eps,
            "mu_recip_a_eps": state.mu_recip_a_eps,
            "mu_recip_sigsq_u": state.mu_recip_sigsq_u,
            "mu_recip_a_u": state.mu_recip_a_u,
        }
    if model == "logistic":
        return {
            "mu_bu": state.mu_bu,
            "Sigma_bu": state.Sigma_bu,
            "mu_recip_sigsq_u": state.mu_recip_sigsq_u,
            "mu_recip_a_u": state.mu_recip_a_u,
        }
    if model == "sparse":
        return {
            "mu_bv": state.mu_bv,
            "Sigma_bv": state.Sigma_bv,
            "mu_b": state.mu_b,
            "mu_gamma": state.mu_gamma,
            "mu_w": state.mu_w,
            "Omega_w": state.Omega_w,
            "mu_recip_sigsq_u": state.mu_recip_sigsq_u,
            "mu_recip_sigsq_eps": state.mu_recip_sigsq_eps,
            "mu_recip_a_u": state.mu_recip_a_u,
            "mu_recip_a_eps": state.mu_recip_a_eps,
            "clamp_events": state.clamp_events,
        }
    raise ValueError(f"unknown model {model!r}")


def _stats_arrays(model, stats):
    if model == "logistic":
        return {"n": stats.n, "cty_half": stats.cty_half, "ct_lam_c": stats.ct_lam_c}
    if model == "sparse":
        return {
            "n": stats.n, "yty": stats.yty, "zt1": stats.zt1, "zty": stats.zty,
            "ztz": stats.ztz, "cty": stats.cty, "ctc": stats.ctc,
        }
    return {"n": stats.n, "yty": stats.yty, "cty": stats.cty, "ctc": stats.ctc}


def save_snapshot(path, model, names, state, stats, spec=None, hyper=None):
    """Write path (npz) and a <path>.csv mirror listing every stored entry."""
    payload = {
        "version": SNAPSHOT_VERSION,
        "model": model,
        "names": np.array(list(names), dtype=object),
    }
    payload.update({f"state_{k}": v for k, v in _state_arrays(model, state).items()})
    payload.update({f"stats_{k}": v for k, v in _stats_arrays(model, stats).items()})
    if spec is not None:
        payload["spec_p"] = spec.p
        payload["spec_block_sizes"] = np.array(spec.block_sizes, dtype=int)
        payload["spec_sigsq_beta"] = spec.sigsq_beta
        payload["spec_A_eps"] = spec.A_eps
        payload["spec_A_u"] = np.array(spec.A_u, dtype=float)
    if hyper is not None:
        for field_name in ("sigsq_beta", "A_u", "A_eps", "A_rho", "B_rho"):
            payload[f"hyper_{field_name}"] = getattr(hyper, field_name)
    np.savez(path, **{k: np.asarray(v) for k, v in payload.items()})

    mirror = path + ".csv" if not path.endswith(".npz") else path[:-4] + ".csv"
    with open(mirror, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["key", "index", "value"])
        for key, value in payload.items():
            arr = np.asarray(value)
            if arr.dtype == object or arr.dtype.kind in "US":
                for idx, item in enumerate(np.atleast_1d(arr)):
                    writer.writerow([key, idx, item])
            else:
                flat = np.atleast_1d(arr).ravel()
                for idx, item in enumerate(flat):
                    writer.writerow([key, idx, repr(float(item))])


def _f(data, key):
    return float(data[key])


def load_snapshot(path):
    """Reconstruct (model, names, state, stats, spec_or_hyper) from an npz."""
    if not os.path.exists(path) and os.path.exists(path + ".npz"):
        path = path + ".npz"
    with np.load(path, allow_pickle=True) as data:
        version = int(data["version"])
        if version != SNAPSHOT_VERSION:
            raise ValueError(f"snapshot version {version} not supported")
        model = str(data["model"])
        names = [str(s) for s in data["names"]]
        extra = None
        if "spec_p" in data:
            extra = BlockSpec(
                p=int(data["spec_p"]),
                block_sizes=tuple(int(k) for k in data["spec_block_sizes"]),
                sigsq_beta=_f(data, "spec_sigsq_beta"),
                A_eps=_f(data, "spec_A_eps"),
                A_u=tuple(float(a) for a in data["spec_A_u"]),
            )
        elif "hyper_A_rho" in data:
            extra = SparseHyper(
                sigsq_beta=_f(data, "hyper_sigsq_beta"),
                A_u=_f(data, "hyper_A_u"),
                A_eps=_f(data, "hyper_A_eps"),
                A_rho=_f(data, "hyper_A_rho"),
                B_rho=_f(data, "hyper_B_rho"),
            )

        if model == "linreg":
            state = LinRegState(
                data["state_mu_beta"], data["state_Sigma_beta"],
                _f(data, "state_mu_recip_sigsq"), _f(data, "state_mu_recip_a"),
            )
            stats = StreamingMoments(
                int(data["stats_n"]), _f(data, "stats_yty"),
                data["stats_cty"], data["stats_ctc"],
            )
        elif model == "lmm":
            state = LMMState(
                data["state_mu_bu"], data["state_Sigma_bu"],
                _f(data, "state_mu_recip_sigsq_eps"), _f(data, "state_mu_recip_a_eps"),
                data["state_mu_recip_sigsq_u"], data["state_mu_recip_a_u"],
            )
            stats = StreamingMoments(
                int(data["stats_n"]), _f(data, "stats_yty"),
                data["stats_cty"], data["stats_ctc"],
            )
        elif model == "logistic":
            state = LogisticState(
                data["state_mu_bu"], data["state_Sigma_bu"],
                data["state_mu_recip_sigsq_u"], data["state_mu_recip_a_u"],
            )
            stats = LogisticMoments(
                int(data["stats_n"]), data["stats_cty_half"], data["stats_ct_lam_c"]
            )
        elif model == "sparse":
            state = SparseState(
                data["state_mu_bv"], data["state_Sigma_bv"], data["state_mu_b"],
                data["state_mu_gamma"], data["state_mu_w"], data["state_Omega_w"],
                _f(data, "state_mu_recip_sigsq_u"), _f(data, "state_mu_recip_sigsq_eps"),
                _f(data, "state_mu_recip_a_u"), _f(data, "state_mu_recip_a_eps"),
                int(data["state_clamp_events"]),
            )
            stats = SparseMoments(
                int(data["stats_n"]), _f(data, "stats_yty"), data["stats_zt1"],
                data["stats_zty"], data["stats_ztz"], data["stats_cty"],
                data["stats_ctc"],
            )
        else:
            raise ValueError(f"unknown model {model!r} in snapshot")
    return model, names, state, stats, extra
