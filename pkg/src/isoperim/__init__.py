"""Certificates and quadrature verification for Gaussian functional inequalities.

The package revolves around surfaces M(x, y) whose 2x2 differential constraint
matrix is negative semidefinite. Such surfaces bound integral functionals of
(f, |grad f|) by the same functional of the mean, and the optimal ones solve a
degenerate Monge-Ampere equation that linearizes into the backwards heat
equation. The modules:

    special        Gaussian cdf/quantile, isoperimetric profile, Gauss-Hermite
                   rules, caloric polynomials
    surfaces       the M(x, y) catalog, constraint matrices, degeneracy tests
    pipeline       Legendre boundary data, backwards-heat solutions,
                   characteristic reconstruction
    semigroup      Ornstein-Uhlenbeck smoothing, interpolation, monotone traces
    verify         quadrature checks for every inequality, with reports
    suite          the acceptance criteria wired end to end
    cli            the `isoperim` command
"""

from .errors import (
    ConfigError,
    DomainError,
    IllPosedError,
    IntegrationError,
    IsoperimError,
    NonInvertibleGradientError,
    PreconditionError,
    ReconstructionError,
    RegionError,
    RootBracketError,
    SingularityError,
    UnsupportedDimensionError,
)
from .pipeline import (
    BoundaryData,
    HeatSolution,
    ReconstructionResult,
    bobkov_heat_solution,
    catalog_boundary,
    ellipticity_check,
    legendre_boundary,
    reconstruct_grid,
    reconstruct_point,
    solve_backward_heat,
)
from .semigroup import OUOperator, interpolation_check, monotonicity_check, ou_apply, ou_gradient
from .special import (
    QuadratureRule,
    gauss_hermite_rule,
    heat_polynomial,
    isoperimetric_profile,
    std_normal_cdf,
    std_normal_quantile,
)
from .surfaces import (
    ConstraintMatrix,
    MSurface,
    arccos_q,
    constraint_matrix,
    degeneracy_residual,
    is_nsd,
    make_catalog_surface,
    nsd_grid_sweep,
)
from .testfunctions import TestFunction, catalog_function, catalog_names
from .verify import (
    MeasureSpec,
    VerificationReport,
    integrate,
    phi_entropy_bound,
    verify_arccos,
    verify_b_theorem_even,
    verify_beckner,
    verify_bobkov,
    verify_houdre_kagan,
    verify_log_sobolev,
    verify_master,
    verify_poincare,
    verify_three_halves,
)

__version__ = "0.1.0"
