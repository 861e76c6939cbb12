"""One-dimensional potentials V with derivative oracles and quadrature.

The target density of one coordinate is exp(-V(x))/Z.  Builtins keep V''
and V''' globally bounded (the regime where the mean-field limit of the
chain is valid) and carry exact curvature metadata used by the moment
bound audits.  Quadrature computes the normalizer Z and the Fisher-type
constant I = int (V')^2 exp(-V) / Z, cross-checked against the
integration-by-parts identity int (V')^2 e^{-V} = int V'' e^{-V}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

__all__ = ["Potential", "QuadratureResult", "builtin_potential", "parse_potential", "compute_Z_and_I"]

_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class Potential:
    """Potential with analytic derivatives v1=V', v2=V'', v3=V'''.

    v2_inf/v2_sup bound V'' globally and v3_sup_abs bounds |V'''|; these
    are caller-asserted for user-registered potentials and exact for
    builtins.  All callables are numpy-vectorized.
    """

    name: str
    v: Callable
    v1: Callable
    v2: Callable
    v3: Callable
    v2_inf: float
    v2_sup: float
    v3_sup_abs: float
    integrable: bool = True
    # exact sampler from exp(-V)/Z when one exists (size, rng) -> array;
    # otherwise stationary draws go through an inverse-CDF table.
    exact_sampler: Callable | None = None


def _gaussian(s: float) -> Potential:
    if not (s > 0.0 and math.isfinite(s)):
        raise ValueError(f"gaussian scale must be positive, got {s}")
    inv_s2 = 1.0 / (s * s)
    return Potential(
        name=f"gaussian:{s:g}",
        v=lambda x: 0.5 * inv_s2 * np.square(x),
        v1=lambda x: inv_s2 * np.asarray(x, dtype=float),
        v2=lambda x: np.full(np.shape(x), inv_s2) if np.ndim(x) else inv_s2,
        v3=lambda x: np.zeros(np.shape(x)) if np.ndim(x) else 0.0,
        v2_inf=inv_s2,
        v2_sup=inv_s2,
        v3_sup_abs=0.0,
        exact_sampler=lambda size, rng: s * rng.standard_normal(size),
    )


def _logcosh() -> Potential:
    def v(x):
        x = np.asarray(x, dtype=float)
        return np.logaddexp(x, -x) - _LOG2

    def sech2(x):
        x = np.asarray(x, dtype=float)
        return np.exp(2.0 * (_LOG2 - np.logaddexp(x, -x)))

    return Potential(
        name="logcosh",
        v=v,
        v1=lambda x: np.tanh(x),
        v2=sech2,
        v3=lambda x: -2.0 * sech2(x) * np.tanh(x),
        v2_inf=0.0,
        v2_sup=1.0,
        # max of |2 sech^2 tanh| over u = tanh x in [-1, 1] is at u = 1/sqrt 3
        v3_sup_abs=4.0 / (3.0 * math.sqrt(3.0)),
    )


def _perturbed_gaussian(eps: float) -> Potential:
    if not (abs(eps) < 1.0):
        raise ValueError(f"perturbed_gaussian requires |eps| < 1, got {eps}")
    return Potential(
        name=f"perturbed_gaussian:{eps:g}",
        v=lambda x: 0.5 * np.square(x) + eps * np.cos(x),
        v1=lambda x: np.asarray(x, dtype=float) - eps * np.sin(x),
        v2=lambda x: 1.0 - eps * np.cos(x),
        v3=lambda x: eps * np.sin(x),
        v2_inf=1.0 - abs(eps),
        v2_sup=1.0 + abs(eps),
        v3_sup_abs=abs(eps),
    )


def _flat() -> Potential:
    # Degenerate patch target: every proposal is accepted; not integrable.
    zero = lambda x: np.zeros(np.shape(x)) if np.ndim(x) else 0.0
    return Potential(
        name="flat", v=zero, v1=zero, v2=zero, v3=zero,
        v2_inf=0.0, v2_sup=0.0, v3_sup_abs=0.0, integrable=False,
    )


def builtin_potential(name: str, params: list[float] | None = None) -> Potential:
    """Construct a builtin by name: gaussian(s), logcosh, perturbed_gaussian(eps), flat."""
    params = list(params or [])
    if name == "gaussian":
        return _gaussian(params[0] if params else 1.0)
    if name == "logcosh":
        return _logcosh()
    if name == "perturbed_gaussian":
        if not params:
            raise ValueError("perturbed_gaussian needs an epsilon parameter")
        return _perturbed_gaussian(params[0])
    if name == "flat":
        return _flat()
    raise ValueError(f"unknown potential {name!r}")


def parse_potential(spec: str) -> Potential:
    """Parse a CLI potential string such as 'gaussian:1.0' or 'logcosh'."""
    name, _, rest = spec.partition(":")
    params = [float(tok) for tok in rest.split(",") if tok] if rest else []
    return builtin_potential(name, params)


@dataclass(frozen=True)
class QuadratureResult:
    z: float
    i_fisher: float
    abs_err_estimate: float


def compute_Z_and_I(p: Potential, domain_halfwidth: float = 30.0, tol: float = 1e-10) -> QuadratureResult:
    """Adaptive quadrature of Z and I = int (V')^2 e^{-V} / Z on [-W, W].

    W must be large enough that exp(-V(+-W)) < tol * exp(-V(0)); the
    integration-by-parts identity int (V')^2 e^{-V} = int V'' e^{-V} is
    verified within 10*tol as a consistency check.
    """
    w = float(domain_halfwidth)
    v0 = float(p.v(0.0))
    if not p.integrable or max(math.exp(v0 - float(p.v(w))), math.exp(v0 - float(p.v(-w)))) >= tol:
        raise ValueError(f"tail mass check failed for {p.name} on [-{w}, {w}]")

    dens = lambda x: math.exp(-float(p.v(x)))
    z, z_err = integrate.quad(dens, -w, w, epsabs=tol, epsrel=tol, limit=200)
    num_i, i_err = integrate.quad(lambda x: float(p.v1(x)) ** 2 * dens(x), -w, w, epsabs=tol, epsrel=tol, limit=200)
    num_b, b_err = integrate.quad(lambda x: float(p.v2(x)) * dens(x), -w, w, epsabs=tol, epsrel=tol, limit=200)
    if z <= 0.0 or max(z_err, i_err, b_err) > max(10.0 * tol, 1e-8):
        raise ValueError(f"quadrature did not converge for {p.name}")
    if abs(num_i - num_b) > 10.0 * tol * max(1.0, abs(num_i)):
        raise ValueError(
            f"integration-by-parts identity violated for {p.name}: {num_i} vs {num_b}"
        )
    return QuadratureResult(z=z, i_fisher=num_i / z, abs_err_estimate=max(z_err, i_err, b_err) / z)
