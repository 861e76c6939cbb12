"""Self-consistent particle discretization of the nonlinear limit SDE.

The limiting dynamics of one chain coordinate is a diffusion whose
coefficients depend on the law of the solution itself:

    dX = sqrt(Gamma(a(t), b(t))) dB - gee(a(t), b(t)) V'(X) dt,
    a(t) = E[(V'(X_t))^2],  b(t) = E[V''(X_t)].

An ensemble of N particles closes the loop with its own empirical
moments: each Euler-Maruyama step freezes (a, b) at the step start
(explicit in both state and measure, weak order 1) and moves every
particle with independent noise.  The empirical moment curve (t, a, b)
doubles as the coefficient source for martingale-defect estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.random import Generator

from .chain import InitialDistribution, STAGE_ENSEMBLE, substream
from .coefficients import gamma_value, gee_value
from .potentials import Potential

__all__ = [
    "EnsembleConfig",
    "ParticleEnsemble",
    "EnsembleResult",
    "TestFunction",
    "ensemble_step",
    "run_ensemble",
    "smooth_taper_family",
    "DefectEstimate",
    "martingale_defect",
    "martingale_defect_detail",
]

MAX_DT = 0.01


@dataclass(frozen=True)
class EnsembleConfig:
    n_particles: int
    dt: float
    horizon: float
    l: float
    seed: int
    init: InitialDistribution

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("need at least one particle")
        if not (0.0 < self.dt <= MAX_DT):
            raise ValueError(f"dt must lie in (0, {MAX_DT}]")
        if self.horizon < 0.0:
            raise ValueError("horizon must be nonnegative")
        if not (self.l > 0.0 and math.isfinite(self.l)):
            raise ValueError("need finite l > 0")


@dataclass
class ParticleEnsemble:
    particles: np.ndarray
    t: float
    moment_history: list  # [(t, a, b)] including the initial entry
    rng: Generator

    @property
    def current_moments(self) -> tuple[float, float]:
        _, a, b = self.moment_history[-1]
        return a, b


def _moments(particles: np.ndarray, p: Potential) -> tuple[float, float]:
    return (
        float(np.mean(np.square(p.v1(particles)))),
        float(np.mean(p.v2(particles))),
    )


def init_ensemble(cfg: EnsembleConfig, p: Potential) -> ParticleEnsemble:
    rng = substream(cfg.seed, STAGE_ENSEMBLE, 0)
    x = cfg.init.sample(cfg.n_particles, rng, p)
    a0, b0 = _moments(x, p)
    return ParticleEnsemble(particles=x, t=0.0, moment_history=[(0.0, a0, b0)], rng=rng)


def ensemble_step(e: ParticleEnsemble, p: Potential, cfg: EnsembleConfig) -> ParticleEnsemble:
    """One explicit step: coefficients frozen at the pre-step empirical law."""
    a, b = e.current_moments
    gam = gamma_value(a, b, cfg.l)
    gee = gee_value(a, b, cfg.l)
    xi = e.rng.standard_normal(cfg.n_particles)
    e.particles += math.sqrt(gam * cfg.dt) * xi - (gee * cfg.dt) * p.v1(e.particles)
    e.t += cfg.dt
    a1, b1 = _moments(e.particles, p)
    e.moment_history.append((e.t, a1, b1))
    return e


@dataclass
class EnsembleResult:
    """Moment curve on the full dt grid plus particle snapshots (identity-ordered)."""

    cfg: EnsembleConfig
    curve_t: np.ndarray
    curve_a: np.ndarray
    curve_b: np.ndarray
    times: np.ndarray        # recorded snapshot times (subset of the dt grid)
    snapshots: np.ndarray    # (len(times), n_particles)

    def snapshot_at(self, t: float) -> np.ndarray:
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > 1e-9:
            raise KeyError(f"time {t} not recorded")
        return self.snapshots[idx]

    def moments_at(self, t: float) -> tuple[float, float]:
        idx = int(round(t / self.cfg.dt))
        idx = min(max(idx, 0), len(self.curve_t) - 1)
        return float(self.curve_a[idx]), float(self.curve_b[idx])


def run_ensemble(cfg: EnsembleConfig, p: Potential, record_times=()) -> EnsembleResult:
    """Step the ensemble to the horizon, snapshotting at the requested times."""
    record_times = np.asarray(sorted(record_times), dtype=float)
    if len(record_times) and (record_times[0] < -1e-12 or record_times[-1] > cfg.horizon + 1e-12):
        raise ValueError("record_times must lie within [0, horizon]")
    n_steps = int(round(cfg.horizon / cfg.dt))
    record_idx = np.clip(np.round(record_times / cfg.dt).astype(int), 0, n_steps)

    e = init_ensemble(cfg, p)
    snapshots = np.empty((len(record_times), cfg.n_particles))
    next_rec = 0
    while next_rec < len(record_idx) and record_idx[next_rec] == 0:
        snapshots[next_rec] = e.particles
        next_rec += 1
    for step in range(1, n_steps + 1):
        ensemble_step(e, p, cfg)
        while next_rec < len(record_idx) and record_idx[next_rec] == step:
            snapshots[next_rec] = e.particles
            next_rec += 1
    hist = np.asarray(e.moment_history)
    return EnsembleResult(
        cfg=cfg,
        curve_t=hist[:, 0], curve_a=hist[:, 1], curve_b=hist[:, 2],
        times=record_idx * cfg.dt, snapshots=snapshots,
    )


# ---------------------------------------------------------------------------
# Compactly supported C^2 test functions and martingale defects.


@dataclass(frozen=True)
class TestFunction:
    """q(x) smoothly tapered to zero outside |x| < 2 * radius."""

    label: str
    phi: Callable
    dphi: Callable
    d2phi: Callable
    radius: float


def _smoothstep(u):
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u))


def _smoothstep_d1(u):
    return 30.0 * u * u * np.square(u - 1.0)


def _smoothstep_d2(u):
    return 60.0 * u * (2.0 * u - 1.0) * (u - 1.0)


def _taper_parts(x, radius):
    ax = np.abs(x)
    u = np.clip((ax - radius) / radius, 0.0, 1.0)
    psi = 1.0 - _smoothstep(u)
    ramp = (ax > radius) & (ax < 2.0 * radius)
    sgn = np.sign(x)
    dpsi = np.where(ramp, -_smoothstep_d1(u) / radius * sgn, 0.0)
    d2psi = np.where(ramp, -_smoothstep_d2(u) / (radius * radius), 0.0)
    return psi, dpsi, d2psi


def _tapered(label, q, dq, d2q, radius):
    def phi(x):
        x = np.asarray(x, dtype=float)
        psi, _, _ = _taper_parts(x, radius)
        return psi * q(x)

    def dphi(x):
        x = np.asarray(x, dtype=float)
        psi, dpsi, _ = _taper_parts(x, radius)
        return dpsi * q(x) + psi * dq(x)

    def d2phi(x):
        x = np.asarray(x, dtype=float)
        psi, dpsi, d2psi = _taper_parts(x, radius)
        return d2psi * q(x) + 2.0 * dpsi * dq(x) + psi * d2q(x)

    return TestFunction(label=label, phi=phi, dphi=dphi, d2phi=d2phi, radius=radius)


def smooth_taper_family(radius: float) -> list[TestFunction]:
    """Tapered x, x^2 and sin x; radius should cover ~99.9% of the mass."""
    one = lambda x: np.ones_like(x)
    zero = lambda x: np.zeros_like(x)
    return [
        _tapered("taper_x", lambda x: x, one, zero, radius),
        _tapered("taper_x2", np.square, lambda x: 2.0 * x, lambda x: np.full_like(x, 2.0), radius),
        _tapered("taper_sin", np.sin, np.cos, lambda x: -np.sin(x), radius),
    ]


@dataclass(frozen=True)
class DefectEstimate:
    value: float
    se: float
    n_particles: int


def martingale_defect_detail(result: EnsembleResult, p: Potential, phi: TestFunction,
                             s: float, t: float) -> DefectEstimate:
    """Estimate E[phi(X_t) - phi(X_s) - int_s^t L_r phi(X_r) dr] with its SE.

    The generator is L_r phi = Gamma(a_r, b_r) phi''/2 - gee(a_r, b_r) V' phi',
    with (a_r, b_r) read off the ensemble's own moment curve; the time
    integral is a trapezoid over the recorded snapshot grid, per particle,
    so the SE reflects genuine cross-particle dispersion.
    """
    if not s < t:
        raise ValueError("need s < t")
    mask = (result.times >= s - 1e-9) & (result.times <= t + 1e-9)
    grid = result.times[mask]
    if len(grid) < 2 or abs(grid[0] - s) > 1e-9 or abs(grid[-1] - t) > 1e-9:
        raise ValueError("s and t must be recorded snapshot times")
    snaps = result.snapshots[mask]
    l = result.cfg.l

    integral = np.zeros(result.cfg.n_particles)
    weights = np.zeros(len(grid))
    dgrid = np.diff(grid)
    weights[:-1] += 0.5 * dgrid
    weights[1:] += 0.5 * dgrid
    for k in range(len(grid)):
        a_k, b_k = result.moments_at(grid[k])
        gam = gamma_value(a_k, b_k, l)
        gee = gee_value(a_k, b_k, l)
        x = snaps[k]
        integral += weights[k] * (0.5 * gam * phi.d2phi(x) - gee * p.v1(x) * phi.dphi(x))

    defect_i = phi.phi(snaps[-1]) - phi.phi(snaps[0]) - integral
    n = len(defect_i)
    return DefectEstimate(
        value=float(np.mean(defect_i)),
        se=float(np.std(defect_i, ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
        n_particles=n,
    )


def martingale_defect(result: EnsembleResult, p: Potential, phi: TestFunction,
                      s: float, t: float) -> float:
    """mean defect only; zero in expectation when the ensemble solves the SDE."""
    return martingale_defect_detail(result, p, phi, s, t).value
