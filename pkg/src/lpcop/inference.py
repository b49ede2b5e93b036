"""Estimation of p from observations of a positive copula.

If some observation lies outside the L_{n-1} unit ball the likelihood is
unbounded as p decreases to the support boundary ``p_star``; that boundary is
returned as the estimate.  Otherwise the log-likelihood is maximized over
(n-1, p_max] by golden-section search in t = log(p - (n-1)).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .copula import SampleBatch, Variant, log_density_constant, lp_norm
from .specfun import DomainError

ROOT_TOL = 1e-10
GOLDEN_TOL = 1e-8
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class FitMethod(str, enum.Enum):
    MLE = "MLE"
    P_STAR = "P_STAR"


@dataclass
class FitResult:
    p_hat: float
    method: FitMethod
    loglik: float  # +inf for P_STAR: the likelihood is unbounded there
    iterations: int
    n: int
    m: int
    hit_p_max: bool = False

    def to_dict(self) -> dict:
        return {
            "p_hat": self.p_hat,
            "method": self.method.value,
            "loglik": "inf" if math.isinf(self.loglik) else self.loglik,
            "iterations": self.iterations,
            "n": self.n,
            "m": self.m,
            "hit_p_max": self.hit_p_max,
            "boundary_estimator": self.method is FitMethod.P_STAR,
        }


def _as_data(batch) -> np.ndarray:
    data = batch.data if isinstance(batch, SampleBatch) else batch
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if data.size == 0:
        raise DomainError("empty batch")
    if isinstance(batch, SampleBatch) and Variant.parse(batch.variant) is not Variant.POSITIVE:
        raise DomainError("inference needs a POSITIVE-variant batch")
    return data


def norm_root_p(x, n: int | None = None) -> float:
    """The p > n-1 solving ||x||_p = 1, by bisection.

    ``p -> ||x||_p`` is continuous and decreasing, so the root is unique.
    Raises DomainError when it does not exist.
    """
    x = np.asarray(x, dtype=float)
    n = x.size if n is None else n
    if np.any(x >= 1.0) or np.any(x < 0.0):
        raise DomainError("coordinates must lie in [0, 1) for a finite root")
    lo = float(n - 1)
    if lp_norm(x, lo) <= 1.0:
        raise DomainError(f"||x||_{lo:g} <= 1: no root above n-1")
    hi = float(n)
    while lp_norm(x, hi) >= 1.0:
        lo, hi = hi, 2.0 * hi
    while hi - lo > ROOT_TOL:
        mid = 0.5 * (lo + hi)
        if lp_norm(x, mid) >= 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def p_star(batch) -> float:
    """inf{p > n-1 : every observation has ||x||_p < 1}; exactly n-1 if no row binds."""
    data = _as_data(batch)
    n = data.shape[1]
    base = lp_norm(data, float(n - 1), axis=1)
    best = float(n - 1)
    # a row needs its own root only if it is still outside the current ball
    for i in np.flatnonzero(base > 1.0):
        if lp_norm(data[i], best) > 1.0:
            best = norm_root_p(data[i], n)
    return best


def log_likelihood(batch, p: float) -> float:
    data = _as_data(batch)
    n = data.shape[1]
    if not p > n - 1:
        raise DomainError(f"log_likelihood needs p > n-1 = {n - 1}, got {p}")
    if np.any(data < 0):
        return -math.inf
    with np.errstate(over="ignore", under="ignore"):
        s = np.sum(data**p, axis=1)
    if np.any(s >= 1.0):
        return -math.inf
    m = data.shape[0]
    return m * log_density_constant(n, p) - ((n - 1) / p) * float(np.sum(np.log1p(-s)))


def _golden(f, a: float, b: float, tol: float):
    """Maximize a unimodal f on [a, b]. Returns (x, f(x), iterations)."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > tol:
        it += 1
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x), it


def fit(batch, p_max: float = 1e3, starts: int = 3) -> FitResult:
    data = _as_data(batch)
    m, n = data.shape
    if np.any(data <= 0) or np.any(data >= 1):
        raise DomainError("fit needs coordinates strictly inside (0, 1)")
    ps = p_star(data)
    if ps > n - 1:
        return FitResult(ps, FitMethod.P_STAR, math.inf, 0, n, m)

    def objective(t):
        return log_likelihood(data, (n - 1) + math.exp(t))

    # t ranges over (-inf, log(p_max - (n-1))]; the lower end is cut where p
    # is indistinguishable from n-1 in double precision
    t_lo = math.log(1e-9 * max(n - 1, 1))
    t_hi = math.log(p_max - (n - 1))
    edges = np.linspace(t_lo, t_hi, starts + 1)
    best = None
    total_it = 0
    for a, b in zip(edges[:-1], edges[1:]):
        t, val, it = _golden(objective, a, b, GOLDEN_TOL)
        total_it += it
        if best is None or val > best[1]:
            best = (t, val)
    t, val = best
    p_hat = (n - 1) + math.exp(t)
    hit = t_hi - t < 10 * GOLDEN_TOL
    return FitResult(p_hat, FitMethod.MLE, val, total_it, n, m, hit_p_max=hit)
