"""Generalized Gini mean difference S_beta and the pairwise-swap search over
permutation couplings used to probe which copula maximizes it.

A permutation coupling of size m puts mass 1/m on the grid points
(u_i, u_sigma(i)) with u_i = (i + 0.5) / m, i = 0..m-1 (indices are 0-based
throughout this module).
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numba
import numpy as np
from numba import njit, prange

from .copula import CopulaParams, Variant, lp_norm
from .sampler import sample_copula
from .specfun import DomainError, RngStream

# skip the TBB probe, which warns on older TBB installs
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
_threads = os.environ.get("LPCOP_THREADS")
if _threads:
    numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))

EXACT_MAX = 20_000
IMPROVE_RTOL = 1e-12


def _check_beta(beta):
    if not (isinstance(beta, (int, float)) and 0 < beta < 2):
        raise DomainError(f"beta must lie in the open interval (0, 2), got {beta!r}")


@njit(parallel=True, cache=True)
def _row_sums(x, beta):
    m, d = x.shape
    half = 0.5 * beta
    out = np.zeros(m)
    for i in prange(m):
        s = 0.0
        for j in range(m):
            if j == i:
                continue
            r2 = 0.0
            for k in range(d):
                t = x[i, k] - x[j, k]
                r2 += t * t
            if r2 > 0.0:
                s += r2**half
        out[i] = s
    return out


@njit(parallel=True, cache=True)
def _row_sums_partners(x, beta, partners):
    m, d = x.shape
    half = 0.5 * beta
    out = np.zeros(m)
    for i in prange(m):
        s = 0.0
        for q in range(partners.shape[1]):
            j = partners[i, q]
            r2 = 0.0
            for k in range(d):
                t = x[i, k] - x[j, k]
                r2 += t * t
            if r2 > 0.0:
                s += r2**half
        out[i] = s
    return out


def s_beta_with_se(points, beta: float, subsample: int | None = None, rng: RngStream | None = None):
    """U-statistic estimate of E||X - Y||_2**beta and its standard error.

    With ``subsample=k`` each point is paired with k uniformly drawn other
    points instead of all m-1 (for large m).  The standard error is the
    first-order Hoeffding term 2 * sd(row means) / sqrt(m).
    """
    _check_beta(beta)
    x = np.ascontiguousarray(np.asarray(points, dtype=float))
    if x.ndim == 1:
        x = x[:, None]
    m = x.shape[0]
    if m < 2:
        raise DomainError("need at least two points")
    if subsample is None or subsample >= m - 1:
        rows = _row_sums(x, float(beta)) / (m - 1)
    else:
        if rng is None:
            raise DomainError("pair subsampling needs an RngStream")
        # offsets in 1..m-1 give a partner distinct from i
        offs = rng.generator.integers(1, m, size=(m, subsample))
        partners = (np.arange(m)[:, None] + offs) % m
        rows = _row_sums_partners(x, float(beta), partners) / subsample
    value = float(np.sum(rows)) / m
    se = 2.0 * float(np.std(rows, ddof=1)) / math.sqrt(m)
    return value, se


def s_beta_empirical(points, beta: float, subsample: int | None = None, rng: RngStream | None = None) -> float:
    return s_beta_with_se(points, beta, subsample, rng)[0]


@dataclass
class PermutationCoupling:
    sigma: np.ndarray
    objective: float | None = None
    sweeps_used: int = 0
    converged: bool = False
    trace: list = field(default_factory=list)
    moves: np.ndarray | None = None

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=np.int64)
        m = self.sigma.size
        if m < 1 or not np.array_equal(np.sort(self.sigma), np.arange(m)):
            raise DomainError("sigma must be a permutation of 0..m-1")

    @property
    def m(self) -> int:
        return self.sigma.size

    def points(self) -> np.ndarray:
        u = (np.arange(self.m) + 0.5) / self.m
        return np.column_stack([u, u[self.sigma]])


def coupling_objective(c: PermutationCoupling, beta: float) -> float:
    if c.m < 2:
        raise DomainError("coupling needs m >= 2")
    return s_beta_empirical(c.points(), beta)


@njit(cache=True)
def _delta_direct(u, sigma, beta, i, j):
    m = sigma.size
    half = 0.5 * beta
    ui, uj = u[i], u[j]
    vi, vj = u[sigma[i]], u[sigma[j]]
    d = 0.0
    for k in range(m):
        if k == i or k == j:
            continue
        uk, vk = u[k], u[sigma[k]]
        a2 = (ui - uk) ** 2
        b2 = (uj - uk) ** 2
        d += (a2 + (vj - vk) ** 2) ** half + (b2 + (vi - vk) ** 2) ** half
        d -= (a2 + (vi - vk) ** 2) ** half + (b2 + (vj - vk) ** 2) ** half
    return d


def swap_delta(c: PermutationCoupling, beta: float, i: int, j: int) -> float:
    """Change of coupling_objective if sigma(i) and sigma(j) are exchanged, in O(m).

    Only pairs touching i or j change; the (i, j) pair keeps its distance.
    """
    _check_beta(beta)
    m = c.m
    if not (0 <= i < m and 0 <= j < m):
        raise DomainError(f"indices out of range for m={m}: {i}, {j}")
    if i == j:
        return 0.0
    u = (np.arange(m) + 0.5) / m
    raw = _delta_direct(u, c.sigma, float(beta), int(i), int(j))
    return 2.0 * raw / (m * (m - 1))


def _grid_table(m: int, beta: float) -> np.ndarray:
    """T[a, b] = ||(a, b) / m||_2**beta for integer grid offsets."""
    a = np.arange(m, dtype=float)
    return np.hypot(a[:, None], a[None, :]) ** beta / float(m) ** beta


@njit(cache=True)
def _raw_total(sigma, T):
    m = sigma.size
    s = 0.0
    for i in range(m):
        for k in range(i + 1, m):
            s += T[k - i, abs(sigma[i] - sigma[k])]
    return s


@njit(cache=True)
def _position_value_sums(sigma, T):
    """A[x, v] = sum_k T[|x - k|, |v - sigma[k]|]: row x's total distance if it held value v."""
    m = sigma.size
    A = np.zeros((m, m))
    for x in range(m):
        for k in range(m):
            a = abs(x - k)
            sk = sigma[k]
            for v in range(m):
                A[x, v] += T[a, abs(v - sk)]
    return A


@njit(cache=True)
def _apply_swap(A, T, i, j, si, sj):
    m = A.shape[0]
    for x in range(m):
        a = abs(x - i)
        b = abs(x - j)
        for v in range(m):
            A[x, v] += T[a, abs(v - sj)] - T[a, abs(v - si)] + T[b, abs(v - si)] - T[b, abs(v - sj)]


@njit(cache=True)
def _sweep(sigma, T, pi, pj, total, rtol, moves):
    # With A from _position_value_sums, the gain of swapping sigma[i] and
    # sigma[j] is O(1); accepting a swap costs an O(m^2) update of A.
    A = _position_value_sums(sigma, T)
    count = 0
    for q in range(pi.size):
        i = pi[q]
        j = pj[q]
        si = sigma[i]
        sj = sigma[j]
        di = abs(i - j)
        ds = abs(si - sj)
        d = A[i, sj] + A[j, si] - A[i, si] - A[j, sj] + 2.0 * (T[di, ds] - T[0, ds] - T[di, 0])
        if d > rtol * total:
            sigma[i] = sj
            sigma[j] = si
            _apply_swap(A, T, i, j, si, sj)
            total += d
            moves[count] = d
            count += 1
    return total, count


@njit(cache=True)
def _cycle_pass(sigma, T, start, total, rtol, moves, count):
    # 3-cycles a <- b <- c <- a (and the reverse) over all triples a < b < c,
    # rows a taken in the order given by ``start``.  Same A-matrix bookkeeping
    # as _sweep; only pairs inside the triple need an explicit correction.
    m = sigma.size
    A = _position_value_sums(sigma, T)
    pos = np.empty(3, np.int64)
    old = np.empty(3, np.int64)
    new = np.empty(3, np.int64)
    for q in range(m):
        a = start[q]
        for b in range(a + 1, m):
            for c in range(b + 1, m):
                for rot in range(2):
                    pos[0] = a
                    pos[1] = b
                    pos[2] = c
                    for r in range(3):
                        old[r] = sigma[pos[r]]
                    if rot == 0:
                        new[0] = old[1]
                        new[1] = old[2]
                        new[2] = old[0]
                    else:
                        new[0] = old[2]
                        new[1] = old[0]
                        new[2] = old[1]
                    d = 0.0
                    for r in range(3):
                        d += A[pos[r], new[r]] - A[pos[r], old[r]]
                        for t in range(3):
                            dp = abs(pos[r] - pos[t])
                            d -= T[dp, abs(new[r] - old[t])] - T[dp, abs(old[r] - old[t])]
                    for r in range(3):
                        for t in range(r + 1, 3):
                            dp = abs(pos[r] - pos[t])
                            d += T[dp, abs(new[r] - new[t])] - T[dp, abs(old[r] - old[t])]
                    if d > rtol * total:
                        for r in range(3):
                            sigma[pos[r]] = new[r]
                        for x in range(m):
                            for r in range(3):
                                dx = abs(x - pos[r])
                                for v in range(m):
                                    A[x, v] += T[dx, abs(v - new[r])] - T[dx, abs(v - old[r])]
                        total += d
                        if count < moves.size:
                            moves[count] = d
                        count += 1
                        break
    return total, count


def _local_search(rng: RngStream, m: int, T, max_sweeps: int, record_moves: bool, cycles: bool):
    sigma = rng.permutation(m).astype(np.int64)
    iu, ju = np.triu_indices(m, 1)
    iu = iu.astype(np.int64)
    ju = ju.astype(np.int64)
    scale = 2.0 / (m * (m - 1))
    total = _raw_total(sigma, T)
    trace = [total * scale]
    buf = np.empty(max(iu.size, 1))
    moves = []
    converged = False
    sweeps = 0
    while sweeps < max_sweeps:
        order = rng.permutation(iu.size)
        total, count = _sweep(sigma, T, iu[order], ju[order], total, IMPROVE_RTOL, buf)
        sweeps += 1
        trace.append(total * scale)
        if record_moves:
            moves.append(buf[:count] * scale)
        if count > 0:
            continue
        if not cycles or m < 3:
            converged = True
            break
        if sweeps >= max_sweeps:
            break
        # pair swaps are exhausted; try 3-cycles before stopping
        total, count = _cycle_pass(sigma, T, rng.permutation(m).astype(np.int64), total, IMPROVE_RTOL, buf, 0)
        sweeps += 1
        trace.append(total * scale)
        if record_moves:
            moves.append(buf[:min(count, buf.size)] * scale)
        if count == 0:
            converged = True
            break
    # re-sum to shed accumulated rounding from incremental updates
    objective = _raw_total(sigma, T) * scale
    return PermutationCoupling(
        sigma, objective, sweeps, converged, trace,
        np.concatenate(moves) if record_moves else None,
    )


def swap_optimize(
    rng: RngStream,
    m: int,
    beta: float,
    max_sweeps: int = 1000,
    restarts: int = 1,
    record_moves: bool = False,
    cycles: bool = True,
) -> PermutationCoupling:
    """Pairwise-swap local search for the permutation coupling maximizing S_beta.

    Each restart begins at a random permutation and sweeps over all pairs
    i < j in a fresh random order, accepting every strictly improving swap
    (gain above 1e-12 times the current objective).  Once a sweep accepts
    nothing, a pass over 3-cycles of sigma values is made (``cycles=True``);
    if it improves, pair sweeps resume.  A restart ends when neither move
    type improves or after ``max_sweeps`` sweeps and passes.  The result is
    always swap-locally optimal when ``converged``.  The best coupling over
    all restarts is returned; ``trace`` holds its objective after each sweep.
    """
    _check_beta(beta)
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    if restarts < 1 or max_sweeps < 1:
        raise DomainError("restarts and max_sweeps must be >= 1")
    T = _grid_table(m, float(beta))
    best = None
    for r in range(restarts):
        c = _local_search(rng.spawn(r), m, T, max_sweeps, record_moves, cycles)
        if best is None or c.objective > best.objective:
            best = c
    return best


@dataclass
class ConjectureReport:
    beta: float
    m: int
    p: float
    heuristic_value: float
    copula_value_mc: float
    copula_value_se: float
    mc_samples: int
    support_inside_fraction: float
    inside_tol: float
    sweeps_used: int
    converged: bool
    coupling: PermutationCoupling | None = None

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "m": self.m,
            "p": self.p,
            "heuristic_value": self.heuristic_value,
            "copula_value_mc": self.copula_value_mc,
            "copula_value_se": self.copula_value_se,
            "mc_samples": self.mc_samples,
            "relative_gap": (self.heuristic_value - self.copula_value_mc) / self.copula_value_mc,
            "support_inside_fraction": self.support_inside_fraction,
            "inside_tol": self.inside_tol,
            "sweeps_used": self.sweeps_used,
            "converged": self.converged,
        }


def inside_fraction(points, p: float, tol: float = 0.0) -> float:
    """Share of points with ||2x - 1||_p <= 1 + tol."""
    return float(np.mean(lp_norm(2.0 * np.asarray(points) - 1.0, p, axis=1) <= 1.0 + tol))


def conjecture_report(
    rng: RngStream,
    beta: float,
    m: int = 1000,
    mc_samples: int = 100_000,
    max_sweeps: int = 1000,
    restarts: int = 1,
    inside_tol: float = 0.0,
    subsample: int = 2000,
    cycles: bool = True,
) -> ConjectureReport:
    """Compare the swap-search optimum with the circular copula at p = 3 - beta.

    Reports numbers only; it makes no claim either way about optimality.
    """
    _check_beta(beta)
    p = 3.0 - beta
    coupling = swap_optimize(rng.spawn(0), m, beta, max_sweeps, restarts, cycles=cycles)
    batch = sample_copula(rng.spawn(1), CopulaParams(2, p), mc_samples, Variant.CIRCULAR)
    sub = subsample if mc_samples > EXACT_MAX else None
    value, se = s_beta_with_se(batch.data, beta, sub, rng.spawn(2))
    return ConjectureReport(
        beta=float(beta),
        m=m,
        p=p,
        heuristic_value=coupling.objective,
        copula_value_mc=value,
        copula_value_se=se,
        mc_samples=mc_samples,
        support_inside_fraction=inside_fraction(coupling.points(), p, inside_tol),
        inside_tol=inside_tol,
        sweeps_used=coupling.sweeps_used,
        converged=coupling.converged,
        coupling=coupling,
    )
