"""Exact i.i.d. sampling from the copulas in every variant.

Rows are generated in fixed-size chunks; chunk ``k`` draws from the child
stream ``rng.spawn(k)``, so output depends only on (params, variant, seed, m).
Inside a chunk the order of consumption is: angular part, radius, signs.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from .copula import (
    CopulaParams,
    RadialKind,
    SampleBatch,
    Variant,
    linf_sphere_sample,
    radial_law,
    transform,
)
from .specfun import DomainError, RngStream, sample_log_beta, sample_log_gamma

CHUNK_ROWS = 1 << 15


def _chunks(m: int):
    start = 0
    k = 0
    while start < m:
        stop = min(start + CHUNK_ROWS, m)
        yield k, start, stop
        start, k = stop, k + 1


def _angular_rows(rng: RngStream, n: int, p: float, rows: int) -> np.ndarray:
    # |Z_i|**p / 2 ~ Gamma(1/p) for p-generalized normal Z, so the normalized
    # vector |Z| / ||Z||_p equals (T_i / sum T)**(1/p).  Kept in log space.
    log_t = sample_log_gamma(rng, 1.0 / p, (rows, n))
    bad = ~np.isfinite(log_t).all(axis=1)
    while bad.any():  # all-zero Z rows; probability zero
        log_t[bad] = sample_log_gamma(rng, 1.0 / p, (int(bad.sum()), n))
        bad = ~np.isfinite(log_t).all(axis=1)
    log_u = (log_t - logsumexp(log_t, axis=1, keepdims=True)) / p
    return np.exp(log_u)


def sample_angular(rng: RngStream, n: int, p: float, m: int) -> np.ndarray:
    """m rows of the positive L_p-uniform law on the unit sphere."""
    if n < 2 or not (math.isfinite(p) and p >= 1):
        raise DomainError(f"need n >= 2 and finite p >= 1, got n={n}, p={p}")
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    out = np.empty((m, n))
    for k, a, b in _chunks(m):
        out[a:b] = _angular_rows(rng.spawn(k), n, p, b - a)
    return out


def _positive_chunk(rng: RngStream, params: CopulaParams, rows: int) -> np.ndarray:
    n, p = params.n, params.p
    law = radial_law(params)
    if law.kind is RadialKind.LINF_MAX:
        return rng.uniform((rows, n))
    u = _angular_rows(rng, n, p, rows)
    if law.kind is RadialKind.POINT_MASS_ONE:
        return u
    a, b = law.beta_shapes
    r = np.exp(sample_log_beta(rng, a, b, rows) / p)
    return r[:, None] * u


def sample_copula(rng: RngStream, params: CopulaParams, m: int, variant=Variant.POSITIVE) -> SampleBatch:
    params.check()
    variant = Variant.parse(variant)
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    out = np.empty((m, params.n))
    for k, a, b in _chunks(m):
        sub = rng.spawn(k)
        chunk = SampleBatch(_positive_chunk(sub, params, b - a), params, Variant.POSITIVE)
        out[a:b] = transform(chunk, variant, sub).data
    return SampleBatch(out, params, variant, rng.seed, {"stream": list(rng.key)})


def sample_integer_p_projection(rng: RngStream, p: int, n: int, m: int) -> SampleBatch:
    """Positive copula for integer p via the first n coordinates of the (p+1)-dim sphere law."""
    if int(p) != p or p < 1:
        raise DomainError(f"p must be a positive integer, got {p}")
    p = int(p)
    if not 2 <= n <= p + 1:
        raise DomainError(f"projection needs 2 <= n <= p+1 = {p + 1}, got n={n}")
    full = sample_angular(rng, p + 1, float(p), m)
    return SampleBatch(
        full[:, :n].copy(), CopulaParams(n, float(p)), Variant.POSITIVE, rng.seed,
        {"method": "projection", "stream": list(rng.key)},
    )


def sample_linf(rng: RngStream, n: int, m: int) -> np.ndarray:
    """m draws from the L_inf-uniform law on the positive unit sphere."""
    return linf_sphere_sample(rng, n, m)
