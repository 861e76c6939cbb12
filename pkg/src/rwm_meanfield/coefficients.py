"""Closed-form coefficients of the mean-field RWM limit.

The diffusion coefficient ``Gamma(a, b)`` and the drift factor ``gee(a, b)``
drive the limiting dynamics of a random walk Metropolis chain with proposal
variance ``l^2/n`` on an n-fold product target.  Their arguments are the two
moments of the instantaneous law,

    a = E[(V'(X))^2],    b = E[V''(X)],

with ``a`` allowed to be +inf.  The limiting mean acceptance probability is
``Gamma(a, b) / l^2`` and the stationary diffusion speed is
``h(l) = 2 l^2 Phi(-l sqrt(I) / 2)``.

Everything here is evaluated in a numerically safe way: the product
``exp(l^2 (a - b) / 2) * Phi(...)`` pairs a huge exponential with an
underflowing normal CDF, so beyond a modest exponent it is computed as
``exp(sum of logs)`` using a scaled-erfc (Mills ratio) log-CDF.

The module also provides the closed-form Gaussian expectations
``E[G (e^{aG + bG~ + c} ^ 1)]`` and relatives, together with Monte Carlo
counterparts used as independent oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox
from scipy import special

__all__ = [
    "ScalingParams",
    "MomentPair",
    "normal_cdf",
    "log_normal_cdf",
    "gamma_value",
    "gee_value",
    "gamma_coef",
    "gee_coef",
    "acc_rate",
    "h_of_l",
    "argmax_h",
    "gaussian_exp_first",
    "gaussian_exp_second",
    "gaussian_exp_cross",
    "gee_gaussian_smoothing",
    "MCEstimate",
    "mc_gaussian_exp_first",
    "mc_gaussian_exp_second",
    "mc_gaussian_exp_cross",
    "mc_gee_smoothing",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Exponent above which exp(c) * Phi(x) switches to exp(c + log Phi(x)).
_LOG_SWITCH = 30.0

# Positive a below this is treated as the a -> 0+ limit for Gamma (the
# formula is continuous there); gee keeps the a > 0 formula, which the
# log-domain route evaluates without spurious NaN down to denormal a.
_TINY_A = 1e-300


@dataclass(frozen=True)
class ScalingParams:
    """Proposal scale constant: the chain uses variance l^2/n per coordinate."""

    l: float

    def __post_init__(self):
        if not (math.isfinite(self.l) and self.l > 0.0):
            raise ValueError(f"l must be positive and finite, got {self.l}")


@dataclass(frozen=True)
class MomentPair:
    """The pair (a, b) = (E[(V')^2], E[V'']); a may be +inf."""

    a: float
    b: float

    def __post_init__(self):
        if math.isnan(self.a) or self.a < 0.0:
            raise ValueError(f"a must be in [0, +inf], got {self.a}")
        if not math.isfinite(self.b):
            raise ValueError(f"b must be finite, got {self.b}")


def normal_cdf(x):
    """Standard normal CDF, accurate in the tails.

    Uses 0.5*erfc(-x/sqrt(2)); for x < -1 the exponential factor is
    evaluated in extended precision so the relative error stays ~1e-15
    deep into the left tail (plain erfc loses ~1e-14 there to rounding
    of x*x/2).
    """
    x_arr = np.asarray(x, dtype=float)
    out = 0.5 * special.erfc(-x_arr / _SQRT2)
    tail = x_arr < -1.0
    if np.any(tail):
        xt = np.atleast_1d(x_arr)[np.atleast_1d(tail)]
        e = np.exp(-0.5 * np.square(xt.astype(np.longdouble))).astype(float)
        vals = 0.5 * special.erfcx(-xt / _SQRT2) * e
        if out.ndim == 0:
            out = vals[0]
        else:
            out[tail] = vals
    return float(out) if np.isscalar(x) or np.ndim(x) == 0 else out


def log_normal_cdf(x):
    """log Phi(x) without underflow.

    For x < -1 uses the scaled complementary error function:
    log Phi(x) = -x^2/2 + log(erfcx(-x/sqrt 2)/2), exact for all finite x.
    For x >= 0 uses log1p(-Phi(-x)) to keep relative accuracy of the
    tiny negative result.
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x_arr)
    neg = x_arr < -1.0
    pos = x_arr >= 0.0
    mid = ~(neg | pos)
    xs = x_arr[neg]
    out[neg] = -0.5 * xs * xs + np.log(0.5 * special.erfcx(-xs / _SQRT2))
    out[mid] = np.log(0.5 * special.erfc(-x_arr[mid] / _SQRT2))
    out[pos] = np.log1p(-0.5 * special.erfc(x_arr[pos] / _SQRT2))
    return float(out[0]) if np.ndim(x) == 0 else out


def _exp_times_cdf(expo, arg, l2):
    """l^2 * exp(expo) * Phi(arg), switching to the log domain for large expo."""
    expo = np.asarray(expo, dtype=float)
    arg = np.asarray(arg, dtype=float)
    big = expo > _LOG_SWITCH
    if np.ndim(expo) == 0 and np.ndim(arg) == 0:
        if big:
            return l2 * math.exp(float(expo) + log_normal_cdf(float(arg)))
        return l2 * math.exp(float(expo)) * normal_cdf(float(arg))
    expo_b, arg_b = np.broadcast_arrays(expo, arg)
    out = np.empty(expo_b.shape, dtype=float)
    big = expo_b > _LOG_SWITCH
    out[big] = l2 * np.exp(expo_b[big] + log_normal_cdf(arg_b[big]))
    out[~big] = l2 * np.exp(expo_b[~big]) * normal_cdf(arg_b[~big])
    return out


def gee_value(a, b, l):
    """Drift factor gee(a, b) for scale l.  `b` may be an array.

        gee(a,b) = l^2 exp(l^2(a-b)/2) Phi(l(b/(2 sqrt a) - sqrt a))   a in (0, inf)
                 = 0                                                   a = +inf
                 = 1_{b>0} l^2 exp(-l^2 b / 2)                         a = 0
    """
    l2 = l * l
    if a == math.inf:
        return 0.0 if np.ndim(b) == 0 else np.zeros(np.shape(b))
    if a == 0.0:
        b_arr = np.asarray(b, dtype=float)
        vals = np.where(b_arr > 0.0, l2 * np.exp(-0.5 * l2 * np.abs(b_arr)), 0.0)
        return float(vals) if np.ndim(b) == 0 else vals
    sa = math.sqrt(a)
    b_arr = np.asarray(b, dtype=float)
    arg = l * (b_arr / (2.0 * sa) - sa)
    expo = 0.5 * l2 * (a - b_arr)
    vals = _exp_times_cdf(expo, arg, l2)
    return float(vals) if np.ndim(b) == 0 else vals


def gamma_value(a, b, l):
    """Diffusion coefficient Gamma(a, b) for scale l.  `b` may be an array.

        Gamma(a,b) = l^2 Phi(-l b / (2 sqrt a)) + gee(a,b)   a in (0, inf)
                   = l^2 / 2                                 a = +inf
                   = l^2 exp(-l^2 b+ / 2)                    a = 0
    """
    l2 = l * l
    if a == math.inf:
        return 0.5 * l2 if np.ndim(b) == 0 else np.full(np.shape(b), 0.5 * l2)
    if a < _TINY_A:  # includes a == 0: continuous limit of the finite-a formula
        b_arr = np.asarray(b, dtype=float)
        bplus = np.maximum(b_arr, 0.0)
        vals = l2 * np.exp(-0.5 * l2 * bplus)
        return float(vals) if np.ndim(b) == 0 else vals
    sa = math.sqrt(a)
    b_arr = np.asarray(b, dtype=float)
    first = l2 * normal_cdf(-l * b_arr / (2.0 * sa))
    vals = first + gee_value(a, b_arr, l)
    return float(vals) if np.ndim(b) == 0 else vals


def gamma_coef(p: MomentPair, s: ScalingParams) -> float:
    """Gamma at a moment pair; always in [0, l^2]."""
    return gamma_value(p.a, p.b, s.l)


def gee_coef(p: MomentPair, s: ScalingParams) -> float:
    """gee at a moment pair; always in [0, Gamma(a,b)]."""
    return gee_value(p.a, p.b, s.l)


def acc_rate(p: MomentPair, s: ScalingParams) -> float:
    """Limiting mean acceptance probability Gamma(a, b) / l^2."""
    return gamma_coef(p, s) / (s.l * s.l)


def h_of_l(l: float, fisher_i: float) -> float:
    """Stationary diffusion speed h(l) = 2 l^2 Phi(-l sqrt(I) / 2)."""
    if l <= 0.0 or fisher_i <= 0.0:
        raise ValueError("h_of_l requires l > 0 and I > 0")
    return 2.0 * l * l * normal_cdf(-0.5 * l * math.sqrt(fisher_i))


def argmax_h(fisher_i: float, lo: float = 1e-3, hi: float = 20.0, tol: float = 1e-6) -> float:
    """Golden-section maximizer of l -> h(l, I); h is unimodal on (0, inf)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = h_of_l(c, fisher_i), h_of_l(d, fisher_i)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = h_of_l(c, fisher_i)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = h_of_l(d, fisher_i)
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# Closed-form Gaussian expectations.
#
# G, G~, G^ denote independent standard normals throughout; `min1` is the
# pointwise minimum with 1.


def gaussian_exp_first(alpha: float, beta: float, gamma: float, s: ScalingParams) -> float:
    """E[G * min1(exp(alpha G + beta G~ + gamma))].

    Computed through gee: the value equals
    (alpha / l^2) * gee((alpha^2 + beta^2) / l^2, -2 gamma / l^2)
    for every l, which the tests exercise as an l-invariance property.
    Odd in alpha; zero when alpha == 0.
    """
    if alpha == 0.0:
        return 0.0
    l2 = s.l * s.l
    return (alpha / l2) * gee_value((alpha * alpha + beta * beta) / l2, -2.0 * gamma / l2, s.l)


def gaussian_exp_second(alpha: float, beta: float, gamma: float) -> float:
    """E[G^2 * min1(exp(alpha G + beta G~ + gamma))], log-stabilized."""
    s2 = alpha * alpha + beta * beta
    if s2 == 0.0:
        raise ValueError("gaussian_exp_second needs (alpha, beta) != (0, 0)")
    r = math.sqrt(s2)
    expo = gamma + 0.5 * s2
    arg = -(gamma + s2) / r
    if expo > _LOG_SWITCH:
        term1 = math.exp(math.log1p(alpha * alpha) + expo + log_normal_cdf(arg))
    else:
        term1 = (1.0 + alpha * alpha) * math.exp(expo) * normal_cdf(arg)
    term2 = normal_cdf(gamma / r)
    term3 = alpha * alpha / (_SQRT_2PI * r) * math.exp(-0.5 * gamma * gamma / s2)
    return term1 + term2 - term3


def gaussian_exp_cross(alpha: float, beta: float, delta: float, gamma: float) -> float:
    """E[G G^ * min1(exp(alpha G + beta G~ + delta G^ + gamma))].

    Vanishes unless both alpha and delta are nonzero (prefactor alpha*delta).
    """
    q = alpha * alpha + beta * beta + delta * delta
    if q == 0.0:
        raise ValueError("gaussian_exp_cross needs (alpha, beta, delta) != (0, 0, 0)")
    if alpha == 0.0 or delta == 0.0:
        return 0.0
    rq = math.sqrt(q)
    expo = gamma + 0.5 * q
    arg = -(gamma + q) / rq
    if expo > _LOG_SWITCH:
        c1 = math.exp(expo + log_normal_cdf(arg))
    else:
        c1 = math.exp(expo) * normal_cdf(arg)
    c2 = math.exp(-0.5 * gamma * gamma / q) / (_SQRT_2PI * rq)
    return alpha * delta * (c1 - c2)


def gee_gaussian_smoothing(a: float, alpha: float, beta: float, s: ScalingParams) -> float:
    """Closed form of E[gee(a, alpha G + beta)]: gee(a + l^2 alpha^2 / 4, beta)."""
    if not (0.0 <= a < math.inf):
        raise ValueError("smoothing identity requires finite a >= 0")
    l = s.l
    return gee_value(a + 0.25 * l * l * alpha * alpha, beta, l)


# ---------------------------------------------------------------------------
# Monte Carlo oracles.  Antithetic pairs over an explicit Philox stream;
# deterministic given the seed and independent of the closed forms above.

_MC_CHUNK = 1 << 20


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    se: float
    n_samples: int

    def z_score(self, reference: float) -> float:
        """Discrepancy in standard errors.

        A zero-variance estimate happens when the payload saturates for
        every draw (e.g. min(e^x, 1) = 1 throughout); the closed form then
        differs only below float noise, which counts as exact agreement.
        """
        diff = reference - self.mean
        if abs(diff) <= 1e-12 * max(1.0, abs(self.mean)):
            return 0.0
        if self.se == 0.0:
            return math.inf
        return diff / self.se


def _mc_stream(seed: int, tag: int, stream: int) -> Generator:
    # tags occupy 3 bits, streams the rest; all keys stay below 2**32 so
    # they never collide with the (stage << 32) keys used by simulations.
    if not 0 <= stream < 1 << 29:
        raise ValueError("stream index out of range")
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, (stream << 3) | tag], dtype=np.uint64)
    return Generator(Philox(key=key))


def _antithetic_mean(payload, n_gaussians: int, n_samples: int, seed: int, tag: int,
                     stream: int = 0) -> MCEstimate:
    """Average payload(Z) over antithetic pairs (Z, -Z), Z ~ N(0, I_k).

    Chunks are merged with the parallel mean/M2 update, which keeps the
    variance accurate even when the payload concentrates so tightly that
    sum-of-squares minus squared-mean would cancel to zero.
    """
    n_pairs = max(1, n_samples // 2)
    rng = _mc_stream(seed, tag, stream)
    n = 0
    mean = 0.0
    m2 = 0.0
    while n < n_pairs:
        m = min(_MC_CHUNK, n_pairs - n)
        z = rng.standard_normal((n_gaussians, m))
        y = 0.5 * (payload(z) + payload(-z))
        chunk_mean = float(np.mean(y))
        chunk_m2 = float(np.sum(np.square(y - chunk_mean)))
        delta = chunk_mean - mean
        total = n + m
        m2 += chunk_m2 + delta * delta * (n * m / total)
        mean += delta * (m / total)
        n = total
    var = m2 / max(n - 1, 1)
    return MCEstimate(mean=mean, se=math.sqrt(var / n), n_samples=2 * n)


def _min1_exp(x):
    # min(exp(x), 1) without overflow
    return np.exp(np.minimum(x, 0.0))


def mc_gaussian_exp_first(alpha, beta, gamma, n_samples=10**7, seed=0, stream=0) -> MCEstimate:
    def payload(z):
        return z[0] * _min1_exp(alpha * z[0] + beta * z[1] + gamma)

    return _antithetic_mean(payload, 2, n_samples, seed, tag=1, stream=stream)


def mc_gaussian_exp_second(alpha, beta, gamma, n_samples=10**7, seed=0, stream=0) -> MCEstimate:
    def payload(z):
        return np.square(z[0]) * _min1_exp(alpha * z[0] + beta * z[1] + gamma)

    return _antithetic_mean(payload, 2, n_samples, seed, tag=2, stream=stream)


def mc_gaussian_exp_cross(alpha, beta, delta, gamma, n_samples=10**7, seed=0, stream=0) -> MCEstimate:
    def payload(z):
        return z[0] * z[2] * _min1_exp(alpha * z[0] + beta * z[1] + delta * z[2] + gamma)

    return _antithetic_mean(payload, 3, n_samples, seed, tag=3, stream=stream)


def mc_gee_smoothing(a, alpha, beta, l, n_samples=10**6, seed=0, stream=0) -> MCEstimate:
    def payload(z):
        return gee_value(a, alpha * z[0] + beta, l)

    return _antithetic_mean(payload, 1, n_samples, seed, tag=4, stream=stream)
