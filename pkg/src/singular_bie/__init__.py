"""Boundary integral solvers for u_xx + u_yy + u_zz + (2 alpha / x) u_x = 0 in x > 0."""

from .bie import NystromSystem, assemble, solve_density
from .bvp import (
    BvpProblem,
    SolutionField,
    SurfaceData,
    energy_diagnostic,
    evaluate_solution,
    solve,
    solve_dirichlet,
    solve_holmgren,
)
from .estimators import DirichletSolver, HolmgrenSolver
from .exceptions import (
    CompatibilityError,
    ConvergenceError,
    DomainError,
    EigenvalueCaseError,
    ParameterError,
    PoleError,
    SingularBIEError,
    SingularityError,
    SingularSystemError,
)
from .geometry import (
    HalfSpacePoint,
    ParamSurface,
    PlanarRegion,
    QuadratureGrid,
    build_disk_grid,
    build_surface_grid,
    make_hemisphere,
    make_tabulated_surface,
)
from .hemisphere import HalfBall, green_g01, green_g02, poisson_dirichlet, poisson_holmgren
from .kernels import KernelKind, SingularityParams, conormal_q1, conormal_q2, q1, q2
from .potentials import (
    DensityVector,
    PlaneData,
    eval_double_layer,
    eval_single_layer,
    eval_single_layer_conormal,
    gauss_flux,
    plane_flux_i,
    plane_potential_dirichlet,
    plane_potential_holmgren,
)
from .specfun import HypergeomParams, gamma_fn, gauss_2f1, hyp2f1

__version__ = "0.1.0"
