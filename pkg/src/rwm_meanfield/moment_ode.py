"""Reference second-moment ODE for the Gaussian target.

With V(x) = x^2/2 the limit law stays Gaussian in the second moment:
m(t) = E[X_t^2] satisfies the closed scalar ODE

    dm/dt = Gamma(m, 1) - 2 m gee(m, 1),

with m* = 1 as fixed point (there Gamma = 2 gee).  Solved with classical
RK4 plus a step-halving error estimate; this curve is the independent
oracle against which both the particle ensemble and the finite-n chain
moment curves are compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coefficients import gamma_value, gee_value

__all__ = ["MomentCurve", "gaussian_rhs", "integrate_moment_ode"]


@dataclass(frozen=True)
class MomentCurve:
    """Second-moment trajectory m(t) = E[X_t^2] on a uniform grid."""

    t: np.ndarray
    m: np.ndarray
    err_estimate: float = 0.0

    def __post_init__(self):
        if np.any(self.m < 0.0):
            raise ValueError("second moments must be nonnegative")
        if np.any(np.diff(self.t) <= 0.0):
            raise ValueError("time grid must be strictly increasing")

    def at(self, times) -> np.ndarray:
        return np.interp(np.asarray(times, dtype=float), self.t, self.m)


def gaussian_rhs(m: float, l: float) -> float:
    """Gamma(m, 1) - 2 m gee(m, 1); finite down to m = 0 via the a = 0 branch."""
    m = max(float(m), 0.0)
    return gamma_value(m, 1.0, l) - 2.0 * m * gee_value(m, 1.0, l)


def _rk4(m0: float, l: float, n_steps: int, dt: float) -> np.ndarray:
    out = np.empty(n_steps + 1)
    out[0] = m = m0
    for k in range(n_steps):
        k1 = gaussian_rhs(m, l)
        k2 = gaussian_rhs(m + 0.5 * dt * k1, l)
        k3 = gaussian_rhs(m + 0.5 * dt * k2, l)
        k4 = gaussian_rhs(m + dt * k3, l)
        m = m + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = m
    return out


def integrate_moment_ode(m0: float, l: float, horizon: float, dt: float = 1e-3,
                         err_tol: float = 1e-8) -> MomentCurve:
    """RK4 trajectory of the moment ODE with a Richardson step-halving check.

    Integrates at dt and dt/2; the returned curve is the half-step run read
    on the dt grid, and the sup-norm difference between the two runs must
    not exceed err_tol.
    """
    if m0 < 0.0:
        raise ValueError("m0 must be nonnegative")
    if not (horizon >= 0.0 and dt > 0.0):
        raise ValueError("need horizon >= 0 and dt > 0")
    n_steps = max(int(round(horizon / dt)), 0)
    coarse = _rk4(m0, l, n_steps, dt)
    fine = _rk4(m0, l, 2 * n_steps, 0.5 * dt)[::2]
    err = float(np.max(np.abs(coarse - fine))) if n_steps else 0.0
    if err > err_tol:
        raise ValueError(f"step-halving error {err:.3e} exceeds {err_tol:.1e}; reduce dt")
    return MomentCurve(t=dt * np.arange(n_steps + 1), m=np.maximum(fine, 0.0), err_estimate=err)
