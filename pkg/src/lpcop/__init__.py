"""L_p-norm spherical copulas: densities, radial laws, samplers, inference and
the S_beta swap-search experiment."""

__version__ = "0.1.0"

from .copula import (
    INF,
    CopulaParams,
    RadialKind,
    RadialLaw,
    SampleBatch,
    Variant,
    angular_marginal_cdf,
    copula_exists,
    density_positive,
    density_variant,
    extendable,
    linf_marginal_cdf,
    linf_sphere_sample,
    lp_norm,
    radial_cdf,
    radial_law,
    radial_moment_p,
    radial_pdf,
    rho,
    transform,
)
from .specfun import DomainError, RngStream
