"""Closed-form laws of the L_p-norm spherical copulas.

Covers existence and extendibility, the copula density in its positive,
signed and circular forms, the radial law, the bivariate correlation
coefficient, angular marginals and the L_inf family.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .specfun import DomainError, RngStream, beta_cdf, digamma

INF = math.inf


class Variant(str, enum.Enum):
    POSITIVE = "positive"  # X+ on [0,1]^n
    SIGNED = "signed"  # X on [-1,1]^n
    CIRCULAR = "circular"  # (X+1)/2 on [0,1]^n

    @classmethod
    def parse(cls, value) -> "Variant":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown variant {value!r}") from None


def parse_p(value) -> float:
    """Accept a real >= 1 or the strings 'inf'/'INF'."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return INF
        value = float(value)
    p = float(value)
    if math.isnan(p) or p < 1:
        raise DomainError(f"p must be >= 1 or INF, got {value!r}")
    return p


@dataclass(frozen=True)
class CopulaParams:
    """Dimension ``n`` and shape ``p`` (``INF`` for the L_inf family).

    Construction does not check existence; law-evaluating functions call
    :meth:`check` first.
    """

    n: int
    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", parse_p(self.p))
        if int(self.n) != self.n:
            raise DomainError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.p)

    def check(self) -> "CopulaParams":
        if not copula_exists(self.n, self.p):
            raise DomainError(
                f"no L_p-norm spherical copula for n={self.n}, p={self.p}: requires p >= n-1 = {self.n - 1}"
            )
        return self

    def to_dict(self) -> dict:
        return {"n": self.n, "p": "inf" if self.is_inf else self.p}


@dataclass
class SampleBatch:
    """An m x n matrix of draws with the law and variant that produced it."""

    data: np.ndarray
    params: CopulaParams
    variant: Variant
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]


def lp_norm(x, p: float, axis: int = -1):
    """||x||_p along ``axis``, with max-factoring so large p neither under- nor overflows."""
    a = np.abs(np.asarray(x, dtype=float))
    top = np.max(a, axis=axis, keepdims=True)
    if math.isinf(p):
        return np.squeeze(top, axis=axis)
    safe = np.where(top > 0, top, 1.0)
    s = np.sum((a / safe) ** p, axis=axis)
    return np.squeeze(top, axis=axis) * s ** (1.0 / p)


def copula_exists(n: int, p: float) -> bool:
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    return math.isinf(p) or p >= n - 1


def extendable(d: int, n: int, p: float) -> bool:
    """Whether a d-variate copula with shape p extends to an n-variate one."""
    if not copula_exists(d, p):
        raise DomainError(f"no copula for d={d}, p={p}")
    if n <= d:
        raise DomainError(f"target dimension n={n} must exceed d={d}")
    return n <= p + 1


def _require_density(params: CopulaParams):
    params.check()
    if params.is_inf:
        raise DomainError("p = INF: use density_variant (independence copula)")
    if params.p <= params.n - 1:
        raise DomainError(
            f"p = n-1 = {params.p}: the law is singular (R = 1 a.s.) and has no density"
        )


def log_density_constant(n: int, p: float) -> float:
    """log of 1 / (Gamma(1+1/p)**(n-1) * Gamma(1-(n-1)/p))."""
    return -(n - 1) * math.lgamma(1.0 + 1.0 / p) - math.lgamma(1.0 - (n - 1) / p)


def log_density_positive(params: CopulaParams, x):
    """log c+(x); -inf off the support. ``x`` has shape (n,) or (m, n)."""
    _require_density(params)
    n, p = params.n, params.p
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != n:
        raise DomainError(f"expected vectors of length {n}, got shape {x.shape}")
    if np.isnan(x).any():
        raise DomainError("NaN in density argument")
    if x.ndim == 1:
        # scalar path for quadrature callers; agrees with the array path to rounding
        if x.min() < 0:
            return -math.inf
        s = sum(sorted(v**p for v in x.tolist()))
        if not s < 1.0:
            return -math.inf
        return log_density_constant(n, p) - ((n - 1) / p) * math.log1p(-s)
    nonneg = np.all(x >= 0, axis=-1)
    with np.errstate(over="ignore"):
        # sorted summation makes the value exactly symmetric in the coordinates
        s = np.sum(np.sort(np.abs(x) ** p, axis=-1), axis=-1)
    inside = nonneg & (s < 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = log_density_constant(n, p) - ((n - 1) / p) * np.log1p(-np.where(inside, s, 0.0))
    out = np.where(inside, val, -np.inf)
    return float(out) if out.ndim == 0 else out


def density_positive(params: CopulaParams, x):
    out = log_density_positive(params, x)
    if isinstance(out, float):
        return math.exp(out)
    out = np.exp(out)
    return float(out) if np.ndim(out) == 0 else out


def density_variant(params: CopulaParams, x, variant=Variant.POSITIVE):
    """Density of the positive, signed or circular copula at ``x``."""
    variant = Variant.parse(variant)
    x = np.asarray(x, dtype=float)
    n = params.n
    if params.is_inf:
        params.check()
        if variant is Variant.SIGNED:
            inside = np.all(np.abs(x) < 1, axis=-1)
            out = np.where(inside, 0.5**n, 0.0)
        else:
            inside = np.all((x > 0) & (x < 1), axis=-1)
            out = np.where(inside, 1.0, 0.0)
        return float(out) if out.ndim == 0 else out
    if variant is Variant.POSITIVE:
        return density_positive(params, x)
    if variant is Variant.SIGNED:
        inside = np.all(np.abs(x) <= 1, axis=-1)
        out = np.where(inside, density_positive(params, np.abs(x)) / 2.0**n, 0.0)
    else:
        inside = np.all((x >= 0) & (x <= 1), axis=-1)
        out = np.where(inside, density_positive(params, np.abs(2.0 * x - 1.0)), 0.0)
    return float(out) if out.ndim == 0 else out


class RadialKind(str, enum.Enum):
    TRANSFORMED_BETA = "transformed_beta"  # R**p ~ Beta(n/p, 1-(n-1)/p)
    POINT_MASS_ONE = "point_mass_one"  # p = n-1
    LINF_MAX = "linf_max"  # CDF r**n


@dataclass(frozen=True)
class RadialLaw:
    kind: RadialKind
    n: int
    p: float

    @property
    def beta_shapes(self) -> tuple[float, float]:
        if self.kind is not RadialKind.TRANSFORMED_BETA:
            raise DomainError(f"{self.kind.value} has no Beta representation")
        return self.n / self.p, 1.0 - (self.n - 1) / self.p


def radial_law(params: CopulaParams) -> RadialLaw:
    params.check()
    if params.is_inf:
        kind = RadialKind.LINF_MAX
    elif params.p == params.n - 1:
        kind = RadialKind.POINT_MASS_ONE
    else:
        kind = RadialKind.TRANSFORMED_BETA
    return RadialLaw(kind, params.n, params.p)


def radial_pdf(law: RadialLaw, r):
    r = np.asarray(r, dtype=float)
    inside = (r > 0) & (r < 1)
    rr = np.where(inside, r, 0.5)
    n, p = law.n, law.p
    if law.kind is RadialKind.POINT_MASS_ONE:
        raise DomainError("R = 1 almost surely; there is no radial density")
    if law.kind is RadialKind.LINF_MAX:
        val = n * rr ** (n - 1)
    else:
        logc = math.lgamma(1.0 / p) - math.lgamma(n / p) - math.lgamma(1.0 - (n - 1) / p)
        val = np.exp(logc + (n - 1) * np.log(rr) - ((n - 1) / p) * np.log1p(-(rr**p)))
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def radial_cdf(law: RadialLaw, r):
    """P(R <= r).

    For the transformed Beta law, r**p underflows long before the CDF is
    negligible when p is large, so tiny arguments use the leading term of
    the incomplete-beta series, evaluated in log space.
    """
    r = np.asarray(r, dtype=float)
    rc = np.clip(r, 0.0, 1.0)
    if law.kind is RadialKind.POINT_MASS_ONE:
        out = np.where(r >= 1, 1.0, 0.0)
    elif law.kind is RadialKind.LINF_MAX:
        out = rc**law.n
    else:
        a, b = law.beta_shapes
        with np.errstate(divide="ignore"):
            logx = law.p * np.log(rc)
        small = logx < math.log(1e-12)
        x = np.exp(np.where(small, 0.0, logx))
        direct = special.betainc(a, b, x)
        log_lead = a * logx - math.log(a) - special.betaln(a, b)
        series = np.exp(np.where(small, log_lead, 0.0))
        out = np.where(small, series, direct)
        out = np.where(r <= 0, 0.0, np.where(r >= 1, 1.0, out))
    return float(out) if out.ndim == 0 else out


def radial_moment_p(params: CopulaParams) -> float:
    """E(R**p) = n / (p + 1)."""
    params.check()
    if params.is_inf:
        raise DomainError("E(R**p) is undefined for p = INF")
    return params.n / (params.p + 1.0)


def rho(p: float) -> float:
    """Pearson correlation of the bivariate positive copula.

    Written as 3 * Gamma(1+2/p)**2 / (Gamma(1+1/p) Gamma(1+3/p)) - 3, which is
    algebraically the same as 4 Gamma(2/p)**2 / (Gamma(1/p) Gamma(3/p)) - 3 but
    avoids cancellation for large p.
    """
    p = float(p)
    if math.isnan(p) or p < 1:
        raise DomainError(f"rho requires p >= 1, got {p}")
    if p == 1:
        return -1.0
    if math.isinf(p):
        return 0.0
    x = 1.0 / p
    lg = math.lgamma
    return 3.0 * math.expm1(2 * lg(1 + 2 * x) - lg(1 + x) - lg(1 + 3 * x))


def rho_log_derivative(x: float) -> float:
    """d/dx log(Gamma(2x)**2 / (Gamma(x) Gamma(3x))) = 4 psi(2x) - psi(x) - 3 psi(3x)."""
    return 4 * digamma(2 * x) - digamma(x) - 3 * digamma(3 * x)


def angular_marginal_cdf(n: int, p: float, u):
    """CDF of one coordinate of the positive L_p-uniform law on the sphere."""
    if n < 2 or not (math.isfinite(p) and p >= 1):
        raise DomainError(f"need n >= 2 and finite p >= 1, got n={n}, p={p}")
    u = np.asarray(u, dtype=float)
    uc = np.clip(u, 0.0, 1.0)
    out = beta_cdf(uc**p, 1.0 / p, (n - 1) / p)
    out = np.where(u <= 0, 0.0, np.where(u >= 1, 1.0, out))
    return float(out) if out.ndim == 0 else out


def transform(batch: SampleBatch, target, rng: RngStream | None = None) -> SampleBatch:
    """Move a batch between the positive, signed and circular variants.

    Only POSITIVE -> SIGNED is random (fresh fair sign per entry, row-major);
    every other leg is a deterministic map and leaves ``rng`` untouched.
    """
    target = Variant.parse(target)
    source = Variant.parse(batch.variant)
    x = np.asarray(batch.data, dtype=float)
    if source is target:
        return batch
    if source is Variant.CIRCULAR:
        x, source = 2.0 * x - 1.0, Variant.SIGNED
    if source is Variant.SIGNED and target is Variant.POSITIVE:
        x, source = np.abs(x), Variant.POSITIVE
    elif source is Variant.POSITIVE and target is not Variant.POSITIVE:
        if rng is None:
            raise DomainError("POSITIVE -> SIGNED needs an RngStream for the signs")
        x = x * rng.signs(x.shape)
        source = Variant.SIGNED
    if source is Variant.SIGNED and target is Variant.CIRCULAR:
        x, source = 0.5 * (x + 1.0), Variant.CIRCULAR
    assert source is target
    return SampleBatch(x, batch.params, target, batch.seed, dict(batch.meta))


def linf_sphere_sample(rng: RngStream, n: int, m: int | None = None):
    """Uniform law on the positive part of the L_inf unit sphere: U / max(U)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    u = rng.uniform((1 if m is None else m, n))
    out = u / u.max(axis=1, keepdims=True)
    return out[0] if m is None else out


def linf_marginal_cdf(n: int, k: int, u) -> float:
    """P(U_1 <= u_1, ..., U_k <= u_k) for the L_inf-uniform law in dimension n.

    Mixture of (n-k)/n uniform-on-cube and, with weight 1/n each, the laws with
    coordinate i pinned to 1. Atoms at 1 are counted right-continuously.
    """
    u = np.clip(np.asarray(u, dtype=float).ravel(), 0.0, 1.0)
    if k > n or k < 1 or u.size != k:
        raise DomainError(f"need 1 <= k <= n and len(u) == k, got n={n}, k={k}, len={u.size}")
    total = (n - k) / n * float(np.prod(u))
    for i in range(k):
        if u[i] >= 1.0:
            total += float(np.prod(np.delete(u, i))) / n
    return total
