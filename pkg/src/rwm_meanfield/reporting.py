"""Writers and readers for the CSV artifacts emitted by the CLI.

Formats (all with `# key=value` manifest headers):

  chain.csv   replica,t,component_index,position,accepted_rate_window,a_emp,b_emp
  limit.csv   t,a,b            (full dt grid; marginal dumps as sidecars)
  ode.csv     t,m
  report.csv  t,w1_chain_vs_limit,acc_emp,acc_pred,a_chain,a_limit,b_chain,b_limit
  closedforms.csv  identity,params,closed_form,mc_mean,mc_se,z_score
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import __version__
from .chain import ChainRun, empirical_moments, windowed_acceptance
from .coefficients import gamma_value
from .compare import ComparisonReport, ComparisonRow, wasserstein1_1d
from .csv_io import read_csv, write_csv
from .mean_field import EnsembleResult
from .potentials import Potential

__all__ = [
    "base_manifest",
    "write_chain_csv",
    "write_limit_csv",
    "write_ode_csv",
    "write_report_csv",
    "write_closedforms_csv",
    "report_from_files",
]


def base_manifest(subcommand: str, params: dict) -> dict:
    manifest = {"tool": f"rwm-meanfield {__version__}", "subcommand": subcommand}
    manifest.update(params)
    return manifest


def write_chain_csv(path: str, runs: list[ChainRun], p: Potential, store_components: int,
                    manifest: dict) -> None:
    cfg = runs[0].cfg
    j = min(store_components, cfg.n)
    window = math.ceil(cfg.n / 10)
    rows = []
    for run in runs:
        for ti, t in enumerate(run.times):
            k = int(math.floor(cfg.n * t + 1e-9))
            acc_w = windowed_acceptance(run.accepted, k, window)
            mom = empirical_moments(run.snapshots[ti], p)
            for c in range(j):
                rows.append((run.replica, float(t), c, float(run.snapshots[ti][c]),
                             acc_w, mom.a, mom.b))
    columns = ["replica", "t", "component_index", "position",
               "accepted_rate_window", "a_emp", "b_emp"]
    write_csv(path, columns, rows, manifest)


def write_limit_csv(path: str, result: EnsembleResult, manifest: dict,
                    dump_marginals: str | None = None) -> None:
    manifest = dict(manifest)
    if dump_marginals:
        # recorded relative to the CSV so the artifact set is relocatable
        # (and byte-identical wherever the output directory lives)
        manifest["marginal_dump"] = os.path.relpath(
            os.path.abspath(dump_marginals), os.path.dirname(os.path.abspath(path)))
        for ti, t in enumerate(result.times):
            dump_path = f"{dump_marginals}_{ti:03d}.csv"
            write_csv(dump_path, ["position"], ((float(x),) for x in result.snapshots[ti]),
                      {"t": float(t), "snapshot_index": ti})
    else:
        manifest["marginal_dump"] = "none"
    manifest["record"] = ",".join(f"{t:g}" for t in result.times)
    rows = zip(result.curve_t.tolist(), result.curve_a.tolist(), result.curve_b.tolist())
    write_csv(path, ["t", "a", "b"], rows, manifest)


def write_ode_csv(path: str, curve, manifest: dict) -> None:
    write_csv(path, ["t", "m"], zip(curve.t.tolist(), curve.m.tolist()), manifest)


def write_report_csv(path: str, report: ComparisonReport, manifest: dict) -> None:
    manifest = dict(manifest)
    manifest.update(report.metadata)
    columns = ["t", "w1_chain_vs_limit", "acc_emp", "acc_pred",
               "a_chain", "a_limit", "b_chain", "b_limit"]
    rows = [(r.t, r.w1_chain_vs_limit, r.acc_emp, r.acc_pred,
             r.a_chain, r.a_limit, r.b_chain, r.b_limit) for r in report.rows]
    write_csv(path, columns, rows, manifest)


def write_closedforms_csv(path: str, rows, manifest: dict) -> None:
    columns = ["identity", "params", "closed_form", "mc_mean", "mc_se", "z_score"]
    write_csv(path, columns, rows, manifest)


def report_from_files(chain_path: str, limit_path: str) -> ComparisonReport:
    """Rebuild a comparison report from chain.csv and limit.csv artifacts.

    The limit file's manifest names its marginal dump sidecars; without
    them the W1 column is NaN.
    """
    c_manifest, c_cols, c_rows = read_csv(chain_path)
    l_manifest, _, l_rows = read_csv(limit_path)
    col = {name: i for i, name in enumerate(c_cols)}
    l_value = float(c_manifest.get("l", "nan"))
    if math.isnan(l_value):
        raise ValueError("chain manifest is missing l")

    curve_t = np.array([r[0] for r in l_rows])
    curve_a = np.array([r[1] for r in l_rows])
    curve_b = np.array([r[2] for r in l_rows])
    limit_times = [float(tok) for tok in l_manifest.get("record", "").split(",") if tok]
    dump = l_manifest.get("marginal_dump", "none")
    marginals = {}
    if dump != "none":
        base = os.path.dirname(os.path.abspath(limit_path))
        prefix = dump if os.path.isabs(dump) else os.path.normpath(os.path.join(base, dump))
        for ti, t in enumerate(limit_times):
            _, _, rows = read_csv(f"{prefix}_{ti:03d}.csv")
            marginals[round(t, 9)] = np.array([r[0] for r in rows])

    # one record per (replica, t) plus the component-0 positions
    per_rt: dict[tuple, list] = {}
    comp0: dict[float, list] = {}
    times_seen: list[float] = []
    for r in c_rows:
        t = round(float(r[col["t"]]), 9)
        key = (int(r[col["replica"]]), t)
        if key not in per_rt:
            per_rt[key] = [r[col["accepted_rate_window"]], r[col["a_emp"]], r[col["b_emp"]]]
            if t not in comp0:
                comp0[t] = []
                times_seen.append(t)
        if int(r[col["component_index"]]) == 0:
            comp0[t].append(float(r[col["position"]]))

    rows_out = []
    for t in times_seen:
        idx = int(np.argmin(np.abs(curve_t - t)))
        a_lim, b_lim = float(curve_a[idx]), float(curve_b[idx])
        acc_vals = [v[0] for (rep, tt), v in per_rt.items() if tt == t]
        a_vals = [v[1] for (rep, tt), v in per_rt.items() if tt == t]
        b_vals = [v[2] for (rep, tt), v in per_rt.items() if tt == t]
        w1 = math.nan
        if t in marginals and comp0[t]:
            w1 = wasserstein1_1d(np.array(comp0[t]), marginals[t])
        rows_out.append(ComparisonRow(
            t=t, w1_chain_vs_limit=w1,
            acc_emp=float(np.mean(acc_vals)), acc_pred=gamma_value(a_lim, b_lim, l_value) / l_value**2,
            a_chain=float(np.mean(a_vals)), a_limit=a_lim,
            b_chain=float(np.mean(b_vals)), b_limit=b_lim,
        ))
    meta = {
        "n": int(float(c_manifest.get("n", 0))), "l": l_value,
        "replicas": len({k[0] for k in per_rt}),
        "n_particles": int(float(l_manifest.get("particles", 0))),
        "chain_seed": int(float(c_manifest.get("seed", 0))),
        "limit_seed": int(float(l_manifest.get("seed", 0))),
        "component": 0,
    }
    return ComparisonReport(rows=rows_out, metadata=meta)
