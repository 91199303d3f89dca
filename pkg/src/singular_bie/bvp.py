"""Dirichlet and Holmgren problems in a domain bounded by a surface and the plane x = 0.

Both problems are reduced to homogeneous plane data with a planar
potential (v1 for Holmgren, v2 for Dirichlet), leaving a double layer on the
surface whose density solves  mu - 2 K mu = -2 (phi - v|_surface).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .bie import assemble, solve_density
from .exceptions import CompatibilityError, DomainError, ParameterError
from .geometry import (
    ParamSurface,
    PlanarRegion,
    QuadratureGrid,
    as_points,
    build_disk_grid,
    build_surface_grid,
)
from .kernels import KernelKind, SingularityParams
from .potentials import (
    DensityVector,
    PlaneData,
    dirichlet_extension_grid,
    double_layer_matrix,
    plane_flux_i_exact,
    plane_potential_dirichlet,
    plane_potential_holmgren,
    plane_potential_holmgren_flux,
)

__all__ = [
    "SurfaceData",
    "BvpProblem",
    "SolutionField",
    "NearGammaWarning",
    "solve",
    "solve_holmgren",
    "solve_dirichlet",
    "evaluate_solution",
    "energy_diagnostic",
    "check_compatibility",
    "star_volume_rule",
]

COMPAT_TOL = 1e-6
N_RIM_SAMPLES = 64
# nodes closer to the rim than this fraction of the local mesh width trigger a warning
NEAR_GAMMA_FRACTION = 0.05


class NearGammaWarning(UserWarning):
    """Surface nodes very close to the rim, where the weight x^(2 alpha) is small."""


@dataclass(frozen=True)
class SurfaceData:
    """Surface data phi given at points (x, y, z) or tabulated in (s, t)."""

    func: Callable
    by_params: bool = False

    def __call__(self, points, params=None):
        if self.by_params:
            if params is None:
                raise ParameterError("tabulated surface data needs (s, t) parameters")
            return np.asarray(self.func(params[:, 0], params[:, 1]), float)
        pts = np.asarray(points, float)
        return np.broadcast_to(np.asarray(self.func(pts), float), pts.shape[:-1]).astype(float)

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        if callable(value):
            return cls(value)
        c = float(value)
        return cls(lambda p: np.full(np.asarray(p).shape[:-1], c))

    @classmethod
    def from_table(cls, s_nodes, t_nodes, values):
        """Bilinear interpolation of ``values[i, j] = phi(s_i, t_j)``."""
        from scipy.interpolate import RegularGridInterpolator

        interp = RegularGridInterpolator(
            (np.asarray(s_nodes, float), np.asarray(t_nodes, float)),
            np.asarray(values, float),
            method="linear",
            bounds_error=False,
            fill_value=None,
        )
        return cls(lambda s, t: interp(np.column_stack([s, t])), by_params=True)


def _coerce_plane(value):
    if value is None:
        return PlaneData.ZERO
    if isinstance(value, PlaneData):
        return value
    if callable(value):
        return PlaneData(value)
    if float(value) == 0.0:
        return PlaneData.ZERO
    return PlaneData.constant(value)


@dataclass
class BvpProblem:
    """Problem description.

    ``kind`` is "dirichlet" (u = phi on the surface, u = tau1 on X) or
    "holmgren" (u = phi on the surface, lim x^(2 alpha) u_x = nu1 on X);
    ``plane_data`` holds tau1 or nu1 accordingly.
    """

    sp: SingularityParams
    surface: ParamSurface
    kind: str
    phi: Union[SurfaceData, Callable, float]
    plane_data: Union[PlaneData, Callable, float, None] = None
    n_s: int = 32
    n_t: int = 32
    region: Optional[PlanarRegion] = None
    n_r: int = 48
    n_phi: int = 64

    def __post_init__(self):
        self.sp = SingularityParams.coerce(self.sp)
        k = str(self.kind).lower()
        if k not in ("dirichlet", "holmgren"):
            raise ParameterError(f"problem kind must be 'dirichlet' or 'holmgren', got {self.kind!r}")
        self.kind = k
        self.phi = SurfaceData.coerce(self.phi)
        self.plane_data = _coerce_plane(self.plane_data)
        if self.region is None:
            if self.surface.rim_radius is None:
                raise ParameterError("surface has no rim radius; pass the planar region explicitly")
            self.region = PlanarRegion(self.surface.rim_radius)

    @property
    def kernel_kind(self):
        return KernelKind.Q2 if self.kind == "dirichlet" else KernelKind.Q1


@dataclass
class SolutionField:
    """u = (planar reduction potential) + (double layer with density ``mu``)."""

    kind: KernelKind
    mu: DensityVector
    sp: SingularityParams
    grid: QuadratureGrid
    reduction: Callable
    problem: BvpProblem = field(repr=False, default=None)
    near_correction: bool = True

    def __call__(self, points):
        return evaluate_solution(self, points)


def check_compatibility(problem: BvpProblem, tol=COMPAT_TOL, n=N_RIM_SAMPLES):
    """Largest |phi - tau1| at sampled rim points; raises above ``tol``."""
    surf = problem.surface
    if surf.edge_t is None:
        return 0.0
    s = np.linspace(surf.s_range[0], surf.s_range[1], n, endpoint=False)
    t = np.full_like(s, surf.edge_t)
    pts = surf.point(s, t)
    pts[:, 0] = 0.0  # the rim lies in the plane; drop rounding residue
    phi = problem.phi(pts, np.column_stack([s, t]))
    tau = problem.plane_data(pts[:, 1], pts[:, 2])
    gap = float(np.abs(phi - tau).max())
    if gap > tol:
        raise CompatibilityError(
            f"surface and plane data disagree on the rim by {gap:.3g} (tolerance {tol:g})"
        )
    return gap


def _warn_near_gamma(grid):
    h = grid.mesh_width
    close = grid.points[:, 0] < NEAR_GAMMA_FRACTION * h
    if np.any(close):
        warnings.warn(
            f"{int(close.sum())} surface nodes lie within {NEAR_GAMMA_FRACTION:g} mesh widths "
            "of the rim; accuracy there is reduced",
            NearGammaWarning,
            stacklevel=3,
        )


def _solve(problem: BvpProblem, reduction, grid):
    _warn_near_gamma(grid)
    phi = problem.phi(grid.points, grid.params)
    phi_red = phi - reduction(grid.points)
    system = assemble(problem.kernel_kind, grid, problem.sp, 2.0)
    mu = solve_density(system, -2.0 * phi_red)
    return SolutionField(problem.kernel_kind, mu, problem.sp, grid, reduction, problem)


def _as_grid(problem, grid):
    if grid is not None:
        return grid
    return build_surface_grid(problem.surface, problem.n_s, problem.n_t)


def solve_holmgren(problem: BvpProblem, grid: Optional[QuadratureGrid] = None) -> SolutionField:
    if problem.kind != "holmgren":
        raise ParameterError("solve_holmgren needs a Holmgren problem")
    grid = _as_grid(problem, grid)
    nu1 = problem.plane_data
    sp = problem.sp
    if nu1.is_zero:
        reduction = _zero_reduction
    else:
        disk = build_disk_grid(problem.region.radius, problem.n_r, problem.n_phi)
        reduction = _Reduction(plane_potential_holmgren, nu1, disk, sp)
    return _solve(problem, reduction, grid)


def solve_dirichlet(problem: BvpProblem, grid: Optional[QuadratureGrid] = None) -> SolutionField:
    if problem.kind != "dirichlet":
        raise ParameterError("solve_dirichlet needs a Dirichlet problem")
    check_compatibility(problem)
    grid = _as_grid(problem, grid)
    tau1 = problem.plane_data
    sp = problem.sp
    if tau1.is_zero:
        reduction = _zero_reduction
    else:
        r0 = problem.region.radius
        disk = dirichlet_extension_grid(r0, problem.n_r, problem.n_phi)
        reduction = _Reduction(plane_potential_dirichlet, tau1, disk, sp, shadow_radius=r0)
    return _solve(problem, reduction, grid)


def solve(problem: BvpProblem, grid=None) -> SolutionField:
    fn = solve_dirichlet if problem.kind == "dirichlet" else solve_holmgren
    return fn(problem, grid)


def _zero_reduction(points):
    return np.zeros(as_points(points).shape[0])


class _Reduction:
    def __init__(self, fn, data, disk, sp, **kw):
        self.fn, self.data, self.disk, self.sp, self.kw = fn, data, disk, sp, kw

    def __call__(self, points):
        return np.atleast_1d(self.fn(self.data, self.disk, as_points(points), self.sp, **self.kw))


def _unit_flux_inside(kind, points, sp, radius):
    """Exact interior value of the unit-density double layer."""
    if kind is KernelKind.Q1:
        return np.full(points.shape[0], -1.0)
    return plane_flux_i_exact(points, radius, sp) - 1.0


def _inside(sol, points):
    """Interior test by the Q1 unit-density flux (-1 inside, 0 outside)."""
    flux = double_layer_matrix(KernelKind.Q1, sol.grid, points, sol.sp).sum(axis=1)
    return flux < -0.5


def evaluate_solution(sol: SolutionField, p, check_domain=True, anchor=None):
    """u(p) at interior points.

    With ``sol.near_correction`` the density value at the nearest node is
    subtracted and added back times the exact unit-density flux, which
    removes most of the quadrature error for points near the surface.
    ``anchor`` (same shape as ``p``) picks the nearest node from other
    points, e.g. to keep it fixed across a finite-difference stencil.
    """
    pts = as_points(p)
    if np.any(pts[:, 0] <= 0):
        raise DomainError("evaluation points must have x > 0")
    if check_domain and not np.all(_inside(sol, pts)):
        raise DomainError("evaluation point outside the domain")
    grid, mu = sol.grid, sol.mu.values
    M = double_layer_matrix(sol.kind, grid, pts, sol.sp)
    if sol.near_correction:
        ref = pts if anchor is None else as_points(anchor)
        d2 = ((ref[:, None, :] - grid.points[None, :, :]) ** 2).sum(-1)
        mu0 = mu[np.argmin(d2, axis=1)]
        flux = _unit_flux_inside(sol.kind, pts, sol.sp, grid.radius)
        w = M @ mu - mu0 * M.sum(axis=1) + mu0 * flux
    else:
        w = M @ mu
    u = sol.reduction(pts) + w
    return float(u[0]) if np.ndim(p) == 1 else u


def star_volume_rule(surface: ParamSurface, n: int, alpha: float = 0.0):
    """Gauss-Legendre volume rule on the cone from the origin over the surface.

    Points lam * p(s, t), lam in (0, 1), with weight lam^2 |p . (p_s x p_t)|.
    Valid for domains star-shaped about the origin (the half-ball is).
    The t-nodes are graded toward the rim as t = edge - L v^k so that
    integrands behaving like x^(-2 alpha) there become smooth in v.
    """
    from .geometry import _gauss_legendre

    lam, wl = _gauss_legendre(n, 0.0, 1.0)
    s, ws = _gauss_legendre(n, *surface.s_range)
    t0, t1 = surface.t_range
    edge = surface.edge_t
    if edge is None or edge not in (t0, t1):
        t, wt = _gauss_legendre(n, t0, t1)
    else:
        k = max(2, math.ceil(2.0 / (1.0 - 2.0 * alpha)))
        other = t0 if edge == t1 else t1
        L = edge - other
        v, wv = _gauss_legendre(n, 0.0, 1.0)
        t = edge - L * v**k
        wt = wv * abs(L) * k * v ** (k - 1)
    S, T = np.meshgrid(s, t, indexing="ij")
    p = surface.point(S, T).reshape(-1, 3)
    ps, pt = surface.derivatives(S, T)
    jac = np.abs(np.einsum("ij,ij->i", p, np.cross(ps, pt).reshape(-1, 3)))
    w_st = np.outer(ws, wt).ravel() * jac
    P = (lam[:, None, None] * p[None, :, :]).reshape(-1, 3)
    W = (wl[:, None] * lam[:, None] ** 2 * w_st[None, :]).ravel()
    return P, W


def _plane_trace_and_flux(sol, yz, eps=1e-3):
    """u and lim x^(2a) u_x on the plane from u at x = eps, 2 eps.

    Near x = 0 solutions behave like tau + nu x^(1-2a)/(1-2a) + O(x^2).
    """
    a = sol.sp.alpha
    x0, x1 = eps, 2 * eps
    p0 = np.column_stack([np.full(len(yz), x0), yz])
    p1 = np.column_stack([np.full(len(yz), x1), yz])
    u0 = evaluate_solution(sol, p0, check_domain=False)
    u1 = evaluate_solution(sol, p1, check_domain=False)
    nu = (1 - 2 * a) * (u1 - u0) / (x1 ** (1 - 2 * a) - x0 ** (1 - 2 * a))
    tau = u0 - nu * x0 ** (1 - 2 * a) / (1 - 2 * a)
    return tau, nu


def _grad(sol, P, step):
    # keep the x-step inside the half-space
    steps = np.column_stack([np.minimum(step, 0.5 * P[:, 0]), np.full((P.shape[0], 2), step)])
    g = np.empty_like(P)
    for i in range(3):
        e = np.zeros_like(P)
        e[:, i] = steps[:, i]
        up = evaluate_solution(sol, P + e, check_domain=False, anchor=P)
        dn = evaluate_solution(sol, P - e, check_domain=False, anchor=P)
        g[:, i] = (up - dn) / (2 * steps[:, i])
    return g


def energy_diagnostic(sol: SolutionField, volume_sampling=12, scale=0.8, step=1e-4):
    """Relative gap between the weighted Dirichlet energy and its boundary form.

    The identity

        integral_D' x^(2a) |grad u|^2 = integral_S' u x^(2a) du/dn - integral_X' tau nu

    holds on every subdomain D' bounded by a surface S' and a plane part X'.
    It is checked on the scaled domain D' = scale * D (D star-shaped about
    the origin), where the numerical solution and its finite-difference
    gradients are reliable; ``volume_sampling`` is the order n of the
    n^3 volume rule (``star_volume_rule``) or a ``(points, weights)`` pair.
    """
    a = sol.sp.alpha
    surf = sol.grid.surface
    if isinstance(volume_sampling, (int, np.integer)):
        n = int(volume_sampling)
        P, wts = star_volume_rule(surf, n, a)
        P, wts = scale * P, scale**3 * wts
    else:
        n = 12
        P, wts = volume_sampling
        P = as_points(P)
        wts = np.asarray(wts, float)
    g = _grad(sol, P, step)
    volume = float(np.sum(wts * P[:, 0] ** (2 * a) * (g * g).sum(axis=1)))

    sgrid = build_surface_grid(surf, max(n, 8), max(n, 8))
    S = scale * sgrid.points
    nrm = sgrid.normals
    dn = (
        evaluate_solution(sol, S + step * nrm, check_domain=False, anchor=S)
        - evaluate_solution(sol, S - step * nrm, check_domain=False, anchor=S)
    ) / (2 * step)
    uS = evaluate_solution(sol, S, check_domain=False)
    boundary = float(np.sum(scale**2 * sgrid.weights * uS * S[:, 0] ** (2 * a) * dn))

    rim = surf.rim_radius if surf.rim_radius is not None else sol.problem.region.radius
    disk = build_disk_grid(scale * rim, max(n, 8), 2 * max(n, 8))
    tau, nu = _plane_trace_and_flux(sol, disk.points[:, 1:])
    boundary -= disk.integrate(tau * nu)
    denom = max(abs(volume), abs(boundary))
    if denom < 1e-300:
        return 0.0
    return abs(volume - boundary) / denom
