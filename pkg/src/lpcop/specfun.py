"""Special functions and scalar/vector samplers shared by the rest of the package.

Every sampler takes an :class:`RngStream` and an optional ``size``; with
``size=None`` a Python float is returned, otherwise an ndarray.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special

EULER_GAMMA = 0.57721566490153286061


class DomainError(ValueError):
    """Raised when an argument lies outside the mathematical domain of an operation."""


class RngStream:
    """Seeded, splittable random stream.

    Backed by the counter-based Philox generator. ``spawn(k)`` derives an
    independent child stream keyed by ``(seed, *key, k)``; children never share
    state with their parent, so one stream per worker is safe.
    """

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.key = tuple(int(k) for k in key)
        ss = np.random.SeedSequence(seed, spawn_key=self.key)
        self.generator = np.random.Generator(np.random.Philox(ss))

    def spawn(self, k: int) -> "RngStream":
        return RngStream(self.seed, self.key + (k,))

    def uniform(self, size=None):
        return self.generator.random(size)

    def standard_normal(self, size=None):
        return self.generator.standard_normal(size)

    def signs(self, size=None):
        """Fair +-1 signs."""
        return self.generator.integers(0, 2, size=size) * 2.0 - 1.0

    def permutation(self, m):
        return self.generator.permutation(m)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, key={self.key})"


def _check_positive(name, x):
    if not (isinstance(x, (int, float, np.floating, np.integer)) and math.isfinite(x) and x > 0):
        raise DomainError(f"{name} must be a finite positive real, got {x!r}")


def log_gamma(x: float) -> float:
    _check_positive("x", x)
    return math.lgamma(x)


# Bernoulli-number coefficients B_2k / (2k) of the asymptotic digamma series.
_PSI_ASYMPTOTIC = (
    1.0 / 12,
    -1.0 / 120,
    1.0 / 252,
    -1.0 / 240,
    1.0 / 132,
    -691.0 / 32760,
    1.0 / 12,
)


def digamma(x: float) -> float:
    """psi(x) = Gamma'(x)/Gamma(x) for x > 0.

    Shift upward with psi(x) = psi(x+1) - 1/x until x >= 10, then use the
    asymptotic expansion; truncation error there is below 1e-16.
    """
    _check_positive("x", x)
    x = float(x)
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    for c in reversed(_PSI_ASYMPTOTIC):
        tail = (tail + c) * inv2
    return acc + math.log(x) - 0.5 / x - tail


def beta_cdf(x, alpha: float, beta: float):
    """Regularized incomplete beta I_x(alpha, beta), clamped to [0, 1]."""
    _check_positive("alpha", alpha)
    _check_positive("beta", beta)
    xa = np.asarray(x, dtype=float)
    out = special.betainc(alpha, beta, np.clip(xa, 0.0, 1.0))
    out = np.clip(out, 0.0, 1.0)
    out = np.where(xa <= 0.0, 0.0, np.where(xa >= 1.0, 1.0, out))
    return float(out) if out.ndim == 0 else out


def _log_gamma_ge1(rng: RngStream, a: float, count: int) -> np.ndarray:
    """log of ``count`` Gamma(a) draws, a >= 1 (Marsaglia-Tsang squeeze)."""
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(count)
    filled = 0
    while filled < count:
        need = count - filled
        batch = max(need + need // 8 + 16, 64)
        z = rng.standard_normal(batch)
        u = rng.uniform(batch)
        v = 1.0 + c * z
        ok = v > 0
        v3 = np.where(ok, v, 1.0) ** 3
        accept = ok & (
            (u < 1.0 - 0.0331 * z**4)
            | (np.log(u) < 0.5 * z * z + d * (1.0 - v3 + np.log(v3)))
        )
        vals = math.log(d) + np.log(v3[accept])
        take = min(need, vals.size)
        out[filled : filled + take] = vals[:take]
        filled += take
    return out


def sample_log_gamma(rng: RngStream, shape: float, size=None):
    """log of Gamma(shape, 1) draws.

    Working in log space keeps tiny shapes (a = 1/p with large p) from
    underflowing to an exact zero.  Shapes below one use the boost
    G(a) = G(a+1) * U**(1/a).
    """
    _check_positive("shape", shape)
    count = 1 if size is None else int(np.prod(size))
    if shape >= 1.0:
        out = _log_gamma_ge1(rng, shape, count)
    else:
        out = _log_gamma_ge1(rng, shape + 1.0, count)
        u = rng.uniform(count)
        out += np.log1p(-u) / shape  # 1-U in (0, 1], avoids log(0)
    if size is None:
        return float(out[0])
    return out.reshape(size)


def sample_gamma(rng: RngStream, shape: float, size=None):
    out = np.exp(sample_log_gamma(rng, shape, size))
    return float(out) if size is None else out


def sample_beta(rng: RngStream, alpha: float, beta: float, size=None):
    """Beta(alpha, beta) as G1 / (G1 + G2)."""
    _check_positive("alpha", alpha)
    _check_positive("beta", beta)
    out = np.exp(sample_log_beta(rng, alpha, beta, size))
    return float(out) if size is None else out


def sample_log_beta(rng: RngStream, alpha: float, beta: float, size=None):
    g1 = sample_log_gamma(rng, alpha, size)
    g2 = sample_log_gamma(rng, beta, size)
    return g1 - np.logaddexp(g1, g2)


def sample_pgen_normal(rng: RngStream, p: float, size=None):
    """p-generalized normal with density proportional to exp(-|x|**p / 2).

    X = S * (2T)**(1/p) with T ~ Gamma(1/p) and S a fair sign.
    """
    if not (math.isfinite(p) and p >= 1):
        raise DomainError(f"p must be a finite real >= 1, got {p!r}")
    log_t = sample_log_gamma(rng, 1.0 / p, size)
    s = rng.signs(size)
    out = s * np.exp((math.log(2.0) + np.asarray(log_t)) / p)
    return float(out) if size is None else out
