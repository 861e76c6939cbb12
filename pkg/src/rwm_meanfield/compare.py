"""Desk-scale statistics comparing the finite-n chain with its limit.

The convergence statements being rendered quantitative are: (i) the
time-marginal of one chain coordinate approaches the limit-ensemble
marginal (empirical W1 between the two sample clouds, non-increasing in
n), (ii) the average acceptance rate at step floor(n t) approaches
Gamma(a(t), b(t)) / l^2, and (iii) leading coordinates decorrelate as n
grows (correlation and copula diagnostics across replicas).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chain import ChainRun, empirical_moments, windowed_acceptance
from .coefficients import gamma_value
from .mean_field import EnsembleResult
from .potentials import Potential

__all__ = [
    "wasserstein1_1d",
    "bootstrap_w1_se",
    "AcceptanceRow",
    "acceptance_curve",
    "ComparisonRow",
    "ComparisonReport",
    "build_report",
    "ChaosRow",
    "chaos_diagnostic",
    "MomentBoundRow",
    "moment_bound_check",
]


def _midpoint_quantiles(sorted_vals: np.ndarray, k: int) -> np.ndarray:
    # inverted-CDF quantiles Q((i+0.5)/k) = x_(ceil(p n)), with the index
    # computed in exact integer arithmetic; reduces to the order statistics
    # themselves when k == len(sorted_vals)
    n = len(sorted_vals)
    num = (2 * np.arange(k, dtype=np.int64) + 1) * n
    idx = (num + 2 * k - 1) // (2 * k) - 1
    return sorted_vals[np.clip(idx, 0, n - 1)]


def wasserstein1_1d(xs, ys) -> float:
    """Order-statistics W1 between two 1-d samples.

    Equal lengths pair sorted samples exactly; unequal lengths compare
    midpoint-quantile interpolations on k = max(len) points (which
    reduces to the exact pairing when the lengths agree).
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) == 0 or len(ys) == 0:
        raise ValueError("empty sample")
    if len(xs) == len(ys):
        return float(np.mean(np.abs(np.sort(xs) - np.sort(ys))))
    k = max(len(xs), len(ys))
    qx = _midpoint_quantiles(np.sort(xs), k)
    qy = _midpoint_quantiles(np.sort(ys), k)
    return float(np.mean(np.abs(qx - qy)))


def bootstrap_w1_se(xs, ys, n_boot: int = 200, seed: int = 0) -> float:
    """Bootstrap SE of wasserstein1_1d under resampling of the smaller cloud.

    The larger cloud is reduced once to len(xs) midpoint quantiles, so each
    bootstrap replicate is an equal-length sorted pairing; the SE captures
    the sampling noise of the small cloud, which dominates.
    """
    from .chain import STAGE_ANALYSIS, substream

    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) > len(ys):
        xs, ys = ys, xs
    k = len(xs)
    ys_q = _midpoint_quantiles(np.sort(ys), k)
    rng = substream(seed, STAGE_ANALYSIS, 1)
    vals = np.empty(n_boot)
    for i in range(n_boot):
        sample = np.sort(xs[rng.integers(0, k, size=k)])
        vals[i] = float(np.mean(np.abs(sample - ys_q)))
    return float(np.std(vals, ddof=1))


@dataclass(frozen=True)
class ComparisonRow:
    t: float
    w1_chain_vs_limit: float
    acc_emp: float
    acc_pred: float
    a_chain: float
    a_limit: float
    b_chain: float
    b_limit: float


@dataclass
class ComparisonReport:
    rows: list
    metadata: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AcceptanceRow:
    t: float
    acc_emp: float
    acc_pred: float


def acceptance_curve(chain_runs: list[ChainRun], limit: EnsembleResult) -> list[AcceptanceRow]:
    """Replica-averaged windowed acceptance against the limit prediction.

    The empirical rate at time t averages a window of ceil(n/10) steps
    around k = floor(n t) in each replica; the prediction is
    Gamma(a(t), b(t)) / l^2 with moments read off the limit moment curve.
    """
    cfg = chain_runs[0].cfg
    window = math.ceil(cfg.n / 10)
    rows = []
    for t in chain_runs[0].times:
        k = int(math.floor(cfg.n * t + 1e-9))
        acc_emp = float(np.mean([windowed_acceptance(r.accepted, k, window) for r in chain_runs]))
        a_lim, b_lim = limit.moments_at(t)
        rows.append(AcceptanceRow(
            t=float(t), acc_emp=acc_emp,
            acc_pred=gamma_value(a_lim, b_lim, cfg.l) / (cfg.l * cfg.l),
        ))
    return rows


def build_report(chain_runs: list[ChainRun], limit: EnsembleResult, p: Potential,
                 component: int = 0) -> ComparisonReport:
    """Per-time comparison of replicated chain runs against a limit ensemble.

    Chain record times must all be present in the limit run (W1 needs the
    marginal snapshots at matching times).
    """
    if not chain_runs:
        raise ValueError("no chain runs")
    cfg = chain_runs[0].cfg
    times = chain_runs[0].times
    acc_rows = acceptance_curve(chain_runs, limit)
    rows = []
    for ti, t in enumerate(times):
        try:
            limit_marginal = limit.snapshot_at(t)
        except KeyError as exc:
            raise ValueError(f"limit run has no snapshot at t={t}") from exc
        chain_marginal = np.array([r.snapshots[ti][component] for r in chain_runs])
        a_lim, b_lim = limit.moments_at(t)
        mom = [empirical_moments(r.snapshots[ti], p) for r in chain_runs]
        rows.append(ComparisonRow(
            t=float(t),
            w1_chain_vs_limit=wasserstein1_1d(chain_marginal, limit_marginal),
            acc_emp=acc_rows[ti].acc_emp,
            acc_pred=acc_rows[ti].acc_pred,
            a_chain=float(np.mean([m.a for m in mom])),
            a_limit=a_lim,
            b_chain=float(np.mean([m.b for m in mom])),
            b_limit=b_lim,
        ))
    meta = {
        "n": cfg.n, "l": cfg.l, "replicas": len(chain_runs),
        "n_particles": limit.cfg.n_particles, "chain_seed": cfg.seed,
        "limit_seed": limit.cfg.seed, "component": component,
    }
    return ComparisonReport(rows=rows, metadata=meta)


@dataclass(frozen=True)
class ChaosRow:
    t: float
    mean_abs_corr: float      # signed leading components across replicas
    mean_abs_corr_sq: float   # squared components (sensitive to shared acceptance)
    copula_dev: float         # max bivariate empirical-copula deviation from u*v
    n_pairs: int


def _copula_deviation(u: np.ndarray, v: np.ndarray, grid_points: int = 9) -> float:
    qs = (np.arange(grid_points) + 1.0) / (grid_points + 1.0)
    dev = 0.0
    for uq in qs:
        le_u = u <= uq
        for vq in qs:
            c_emp = float(np.mean(le_u & (v <= vq)))
            dev = max(dev, abs(c_emp - uq * vq))
    return dev


def _ranks(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="stable")
    r = np.empty_like(order)
    r[order] = np.arange(1, len(x) + 1)
    return r / (len(x) + 1.0)


def chaos_diagnostic(chain_runs: list[ChainRun], j: int = 2) -> list[ChaosRow]:
    """Cross-component dependence of the first j coordinates across replicas.

    Both statistics shrink with the dimension n: the only coupling between
    coordinates is the shared accept/reject decision, whose influence on
    any fixed pair vanishes in the mean-field limit.
    """
    if j > 5:
        raise ValueError("diagnostic intended for small j <= 5")
    cfg = chain_runs[0].cfg
    j = min(j, cfg.n)
    rows = []
    for ti, t in enumerate(chain_runs[0].times):
        comp = np.array([r.snapshots[ti][:j] for r in chain_runs])  # (R, j)
        if j < 2 or len(chain_runs) < 3:
            rows.append(ChaosRow(float(t), math.nan, math.nan, math.nan, 0))
            continue
        corr = np.corrcoef(comp, rowvar=False)
        corr_sq = np.corrcoef(np.square(comp), rowvar=False)
        iu = np.triu_indices(j, k=1)
        cop = 0.0
        for i1, i2 in zip(*iu):
            cop = max(cop, _copula_deviation(_ranks(comp[:, i1]), _ranks(comp[:, i2])))
        rows.append(ChaosRow(
            t=float(t),
            mean_abs_corr=float(np.mean(np.abs(corr[iu]))),
            mean_abs_corr_sq=float(np.mean(np.abs(corr_sq[iu]))),
            copula_dev=cop,
            n_pairs=len(iu[0]),
        ))
    return rows


@dataclass(frozen=True)
class MomentBoundRow:
    s: float
    t: float
    lhs: float
    lhs_se: float
    rhs: float
    passed: bool


def moment_bound_check(limit: EnsembleResult, p: Potential) -> list[MomentBoundRow]:
    """Audit E[(X_t - X_s)^2] <= 2 l^2 [(t-s) + (l^2 sup(V'')+ v 2/pi)(t-s)^2].

    The displacement pairs the same particle at both times (snapshots are
    identity-ordered); the explicit-constant bound must hold with 3-SE slack.
    """
    l2 = limit.cfg.l ** 2
    cst = max(l2 * max(p.v2_sup, 0.0), 2.0 / math.pi)
    rows = []
    n = limit.snapshots.shape[1] if len(limit.times) else 0
    for i_s in range(len(limit.times)):
        for i_t in range(i_s, len(limit.times)):
            s, t = float(limit.times[i_s]), float(limit.times[i_t])
            disp2 = np.square(limit.snapshots[i_t] - limit.snapshots[i_s])
            lhs = float(np.mean(disp2))
            se = float(np.std(disp2, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
            rhs = 2.0 * l2 * ((t - s) + cst * (t - s) ** 2)
            rows.append(MomentBoundRow(s=s, t=t, lhs=lhs, lhs_se=se, rhs=rhs,
                                       passed=lhs <= rhs + 3.0 * se))
    return rows
