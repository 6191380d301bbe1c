"""q-zw measures on the double q-lattice.

Link rows between adjacent levels, pseudo big q-Jacobi polynomials, the
determinantal zw measures they generate, and the boundary limit: the
rescaled kernel, its correlation functions, and finite-prefix
approximations of boundary points.
"""

from .boundary_approx import (
    BoundaryPoint,
    LinkApproximation,
    approx_boundary_link,
    boundary_point,
    correlation_convergence,
    lln_check,
    moment_residuals,
    tv_distance,
)
from .graph_links import (
    LinkRow,
    Signature,
    branching_identity_check,
    dim,
    link_compose,
    link_row,
    link_row_mass,
    link_sample,
    schur_tilde,
)
from .lattice import (
    MINUS,
    PLUS,
    Configuration,
    LatticeParams,
    LatticePoint,
    TailSpec,
    VariationalSeries,
    interlace,
    interval_I,
    interval_I_tilde,
    variational_series,
)
from .limit_kernel import (
    BoundaryKernel,
    F_r,
    boundary_correlation,
    boundary_kernel,
    h_frak,
    kernel_convergence_table,
    phi32_limit_check,
    scaled_kernel_N,
    scaled_norm_finite,
    scaled_weighted_poly,
)
from .pbqj import (
    PBQJParams,
    norm_h,
    orthogonality_check,
    pbqj_eval,
    pbqj_params,
    poly_system,
    weight_w,
)
from .verification import CheckResult, run_all
from .zw_measures import (
    EnsembleN,
    ParamQuadruple,
    coherency_check,
    correlation_N,
    ensemble,
    kernel_sum_form,
    measure_weight,
    param_quadruple,
    sample_ensemble,
)

__version__ = "0.1.0"

__all__ = [
    "MINUS",
    "PLUS",
    "BoundaryKernel",
    "BoundaryPoint",
    "CheckResult",
    "Configuration",
    "EnsembleN",
    "F_r",
    "LatticeParams",
    "LatticePoint",
    "LinkApproximation",
    "LinkRow",
    "PBQJParams",
    "ParamQuadruple",
    "Signature",
    "TailSpec",
    "VariationalSeries",
    "approx_boundary_link",
    "boundary_correlation",
    "boundary_kernel",
    "boundary_point",
    "branching_identity_check",
    "coherency_check",
    "correlation_N",
    "correlation_convergence",
    "dim",
    "ensemble",
    "h_frak",
    "interlace",
    "interval_I",
    "interval_I_tilde",
    "kernel_convergence_table",
    "kernel_sum_form",
    "link_compose",
    "link_row",
    "link_row_mass",
    "link_sample",
    "lln_check",
    "measure_weight",
    "moment_residuals",
    "norm_h",
    "orthogonality_check",
    "param_quadruple",
    "pbqj_eval",
    "pbqj_params",
    "phi32_limit_check",
    "poly_system",
    "run_all",
    "sample_ensemble",
    "scaled_kernel_N",
    "scaled_norm_finite",
    "scaled_weighted_poly",
    "schur_tilde",
    "tv_distance",
    "variational_series",
    "weight_w",
]
