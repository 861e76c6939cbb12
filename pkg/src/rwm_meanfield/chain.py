"""Exact simulation of the n-dimensional RWM chain with a product target.

One Metropolis step proposes a joint move of all n coordinates,
x_i -> x_i + (l/sqrt n) G_i, and accepts or rejects them all at once by
comparing log U with the exact log density ratio sum_i (V(x_i) - V(y_i)).
The common acceptance event is the only coupling between coordinates,
which is what makes the system mean-field.  Time is accelerated by n:
the recorded process is k = floor(n t).

All accept/reject arithmetic stays in the log domain (n * dV can be far
beyond exp range).  Replicas draw from non-overlapping Philox streams
keyed by (seed, replica), so a replica's trajectory does not depend on
how many workers ran it.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .coefficients import MomentPair
from .potentials import Potential, parse_potential

__all__ = [
    "InitialDistribution",
    "ChainConfig",
    "ChainState",
    "StepRecord",
    "ChainRun",
    "substream",
    "chain_step",
    "run_chain",
    "run_replicas",
    "empirical_moments",
    "windowed_acceptance",
    "propose_accept",
]

# Stage tags partition the Philox key space between subsystems.
STAGE_CHAIN = 1
STAGE_ENSEMBLE = 2
STAGE_ANALYSIS = 3


def substream(seed: int, stage: int, index: int = 0) -> Generator:
    """Counter-based splittable stream for (seed, stage, index)."""
    if not (0 <= index < 1 << 32 and 0 < stage < 1 << 31):
        raise ValueError("stage/index out of range for key packing")
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, (stage << 32) | index], dtype=np.uint64)
    return Generator(Philox(key=key))


@dataclass(frozen=True)
class InitialDistribution:
    """Exchangeable initial law: i.i.d. draws or a common point mass."""

    kind: str
    params: tuple = ()

    @classmethod
    def iid_normal(cls, mean: float = 0.0, sd: float = 1.0):
        if sd <= 0.0:
            raise ValueError("sd must be positive")
        return cls("iid_normal", (float(mean), float(sd)))

    @classmethod
    def iid_uniform(cls, lo: float, hi: float):
        if not lo < hi:
            raise ValueError("need lo < hi")
        return cls("iid_uniform", (float(lo), float(hi)))

    @classmethod
    def stationary(cls, burnin: int = 0):
        # burnin is accepted for interface compatibility; sampling is exact
        # (closed form or inverse-CDF), so no burn-in is ever consumed.
        return cls("stationary", (int(burnin),))

    @classmethod
    def point(cls, x0: float):
        return cls("point", (float(x0),))

    def sample(self, n: int, rng: Generator, potential: Potential | None = None) -> np.ndarray:
        if self.kind == "iid_normal":
            mean, sd = self.params
            return mean + sd * rng.standard_normal(n)
        if self.kind == "iid_uniform":
            lo, hi = self.params
            return rng.uniform(lo, hi, n)
        if self.kind == "point":
            return np.full(n, self.params[0])
        if self.kind == "stationary":
            if potential is None:
                raise ValueError("stationary init needs the target potential")
            if potential.exact_sampler is not None:
                return potential.exact_sampler(n, rng)
            xs, cdf = _inverse_cdf_table(potential)
            return np.interp(rng.random(n), cdf, xs)
        raise ValueError(f"unknown initial distribution {self.kind!r}")

    def spec_string(self) -> str:
        return self.kind + (":" + ",".join(f"{p:g}" for p in self.params) if self.params else "")


def parse_init(spec: str) -> InitialDistribution:
    name, _, rest = spec.partition(":")
    params = [float(tok) for tok in rest.split(",") if tok] if rest else []
    if name == "iid_normal":
        return InitialDistribution.iid_normal(*(params or (0.0, 1.0)))
    if name == "iid_uniform":
        return InitialDistribution.iid_uniform(*params)
    if name == "stationary":
        return InitialDistribution.stationary(int(params[0]) if params else 0)
    if name == "point":
        return InitialDistribution.point(*params)
    raise ValueError(f"unknown init spec {spec!r}")


_CDF_CACHE: dict[str, tuple[np.ndarray, np.ndarray]] = {}


def _inverse_cdf_table(p: Potential, points: int = 1 << 18):
    """Tabulated inverse CDF of exp(-V)/Z for exact-in-law stationary draws."""
    if not p.integrable:
        raise ValueError(f"potential {p.name} has no normalizable target")
    if p.name in _CDF_CACHE:
        return _CDF_CACHE[p.name]
    v0 = float(p.v(0.0))
    w = 1.0
    while (math.exp(v0 - float(p.v(w))) > 1e-14 or math.exp(v0 - float(p.v(-w))) > 1e-14) and w < 1e6:
        w *= 2.0
    xs = np.linspace(-w, w, points + 1)
    dens = np.exp(-(p.v(xs) - v0))
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(xs))])
    cdf /= cdf[-1]
    keep = np.concatenate([[True], np.diff(cdf) > 0.0])
    _CDF_CACHE[p.name] = (xs[keep], cdf[keep])
    return _CDF_CACHE[p.name]


@dataclass(frozen=True)
class ChainConfig:
    n: int
    l: float
    steps: int
    seed: int
    init: InitialDistribution
    replica: int = 0

    def __post_init__(self):
        if self.n < 1 or self.steps < 1:
            raise ValueError("need n >= 1 and steps >= 1")
        if not (self.l > 0.0 and math.isfinite(self.l)):
            raise ValueError("need finite l > 0")


@dataclass
class ChainState:
    positions: np.ndarray
    k: int
    rng: Generator
    v_sum: float  # cached sum_i V(x_i), kept in lockstep with positions


@dataclass(frozen=True)
class StepRecord:
    accepted: bool
    log_ratio: float
    a_emp: float
    b_emp: float


def init_state(cfg: ChainConfig, p: Potential) -> ChainState:
    rng = substream(cfg.seed, STAGE_CHAIN, cfg.replica)
    x = cfg.init.sample(cfg.n, rng, p)
    return ChainState(positions=x, k=0, rng=rng, v_sum=float(np.sum(p.v(x))))


def empirical_moments(positions: np.ndarray, p: Potential) -> MomentPair:
    """Empirical (a, b) = (mean of V'(x)^2, mean of V''(x))."""
    if len(positions) == 0:
        raise ValueError("empty position vector")
    return MomentPair(
        a=float(np.mean(np.square(p.v1(positions)))),
        b=float(np.mean(p.v2(positions))),
    )


def propose_accept(positions, v_sum, gaussians, log_u, scale, p: Potential):
    """Joint proposal and all-or-nothing acceptance; pure and permutation-equivariant.

    Returns (new_positions, new_v_sum, accepted, log_ratio).
    """
    proposal = positions + scale * gaussians
    v_sum_prop = float(np.sum(p.v(proposal)))
    log_ratio = v_sum - v_sum_prop
    accepted = log_u <= log_ratio
    if accepted:
        return proposal, v_sum_prop, True, log_ratio
    return positions, v_sum, False, log_ratio


def chain_step(state: ChainState, p: Potential, cfg: ChainConfig) -> tuple[ChainState, StepRecord]:
    """One Metropolis step; mutates `state` in place and returns it with the record.

    The record carries the empirical moments of the pre-step configuration.
    Noise ordering is fixed: n coordinate normals, then one uniform.
    """
    mom = empirical_moments(state.positions, p)
    g = state.rng.standard_normal(cfg.n)
    u = state.rng.random()
    log_u = math.log(u) if u > 0.0 else -math.inf
    scale = cfg.l / math.sqrt(cfg.n)
    state.positions, state.v_sum, accepted, log_ratio = propose_accept(
        state.positions, state.v_sum, g, log_u, scale, p
    )
    state.k += 1
    return state, StepRecord(accepted=accepted, log_ratio=log_ratio, a_emp=mom.a, b_emp=mom.b)


@dataclass
class ChainRun:
    """Trajectory table of one replica: snapshots keyed by recorded times."""

    replica: int
    times: np.ndarray          # recorded times t
    snapshots: np.ndarray      # (len(times), n) positions at k = floor(n t)
    accepted: np.ndarray       # (steps,) acceptance indicators
    a_emp: np.ndarray          # (steps,) pre-step empirical a
    b_emp: np.ndarray          # (steps,) pre-step empirical b
    cfg: ChainConfig

    def snapshot_at(self, t: float) -> np.ndarray:
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > 1e-12:
            raise KeyError(f"time {t} not recorded")
        return self.snapshots[idx]


def run_chain(cfg: ChainConfig, p: Potential, record_times) -> ChainRun:
    """Run the chain for cfg.steps steps, snapshotting at k = floor(n t)."""
    record_times = np.asarray(sorted(record_times), dtype=float)
    if len(record_times) and record_times[-1] * cfg.n > cfg.steps + 1e-9:
        raise ValueError("record_times extend past steps/n")
    record_ks = np.floor(record_times * cfg.n + 1e-9).astype(int)

    state = init_state(cfg, p)
    snapshots = np.empty((len(record_times), cfg.n))
    accepted = np.empty(cfg.steps, dtype=bool)
    a_emp = np.empty(cfg.steps)
    b_emp = np.empty(cfg.steps)

    next_rec = 0
    while next_rec < len(record_ks) and record_ks[next_rec] == 0:
        snapshots[next_rec] = state.positions
        next_rec += 1
    for step in range(cfg.steps):
        _, rec = chain_step(state, p, cfg)
        accepted[step] = rec.accepted
        a_emp[step] = rec.a_emp
        b_emp[step] = rec.b_emp
        while next_rec < len(record_ks) and record_ks[next_rec] == state.k:
            snapshots[next_rec] = state.positions
            next_rec += 1
    return ChainRun(
        replica=cfg.replica, times=record_times, snapshots=snapshots,
        accepted=accepted, a_emp=a_emp, b_emp=b_emp, cfg=cfg,
    )


def _replica_task(args):
    pot_name, cfg, record_times = args
    return run_chain(cfg, parse_potential(pot_name), record_times)


def run_replicas(cfg: ChainConfig, p: Potential, record_times, replicas: int, threads: int | None = None) -> list[ChainRun]:
    """Independent replicas 0..replicas-1 of the same experiment.

    Results are identical whatever `threads` is: each replica has its own
    (seed, replica)-keyed stream and results are gathered in replica order.
    Parallel execution rebuilds builtin potentials by name in the workers.
    """
    configs = [ChainConfig(cfg.n, cfg.l, cfg.steps, cfg.seed, cfg.init, replica=r) for r in range(replicas)]
    threads = threads if threads is not None else (os.cpu_count() or 1)
    if threads <= 1 or replicas <= 1:
        return [run_chain(c, p, record_times) for c in configs]
    try:
        parse_potential(p.name)
    except ValueError:
        return [run_chain(c, p, record_times) for c in configs]
    tasks = [(p.name, c, record_times) for c in configs]
    with ProcessPoolExecutor(max_workers=min(threads, replicas)) as pool:
        return list(pool.map(_replica_task, tasks, chunksize=max(1, replicas // (4 * threads))))


def windowed_acceptance(accepted: np.ndarray, k: int, window: int) -> float:
    """Mean acceptance over a window of `window` steps centered near step k."""
    steps = len(accepted)
    w = max(1, min(window, steps))
    lo = min(max(0, k - w // 2), steps - w)
    return float(np.mean(accepted[lo:lo + w]))
