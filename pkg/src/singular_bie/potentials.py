"""Layer potentials over the surface grid and the planar reduction potentials.

Surface potentials are plain quadrature sums; targets closer to the surface
than about one mesh width get less accurate (the kernels peak there).  The
planar potentials subtract the density value at the target's projection
and add it back times the exact disk integral of the kernel, which keeps
them usable close to the plane x = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _parallel
from .exceptions import DomainError, ParameterError
from .geometry import QuadratureGrid, as_points, build_disk_grid
from .kernels import KernelKind, SingularityParams, conormal, fundamental

__all__ = [
    "DensityVector",
    "PlaneData",
    "double_layer_matrix",
    "single_layer_matrix",
    "eval_double_layer",
    "eval_single_layer",
    "eval_single_layer_conormal",
    "gauss_flux",
    "plane_flux_i",
    "plane_flux_i_exact",
    "disk_kernel_integral",
    "plane_potential_holmgren",
    "plane_potential_holmgren_flux",
    "plane_potential_dirichlet",
    "dirichlet_extension_grid",
    "density_interpolant",
    "adaptive_panels",
    "adaptive_layer",
    "richardson",
    "double_layer_limit",
    "single_layer_limit",
    "single_layer_conormal_limit",
]

TWO_PI = 2.0 * math.pi
N_THETA = 2048
N_POLAR_THETA = 128
N_POLAR_S = 32


@dataclass(frozen=True)
class DensityVector:
    """Layer density sampled at the nodes of ``grid``."""

    values: np.ndarray
    grid: QuadratureGrid

    def __post_init__(self):
        v = np.asarray(self.values, float).ravel()
        if v.size != self.grid.size:
            raise ParameterError(
                f"density has {v.size} values but the grid has {self.grid.size} nodes"
            )
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, grid, value=1.0):
        return cls(np.full(grid.size, float(value)), grid)

    @classmethod
    def from_function(cls, grid, fn):
        """Sample ``fn(points)`` at the grid nodes (points have shape (n, 3))."""
        return cls(np.asarray(fn(grid.points), float), grid)


@dataclass(frozen=True)
class PlaneData:
    """Data on the plane x = 0 given as a function of (y, z).

    Build from a callable, a constant, or a table on a polar (r, phi) grid
    (bilinear interpolation).
    """

    func: Callable

    def __call__(self, y, z):
        y = np.asarray(y, float)
        z = np.asarray(z, float)
        out = np.asarray(self.func(y, z), float)
        return np.broadcast_to(out, np.broadcast(y, z).shape).astype(float)

    @classmethod
    def constant(cls, value):
        value = float(value)
        return cls(lambda y, z: np.full(np.broadcast(y, z).shape, value))

    @classmethod
    def zero(cls):
        return cls.constant(0.0)

    @property
    def is_zero(self):
        return getattr(self.func, "_is_zero", False)

    @classmethod
    def from_polar_table(cls, r_nodes, phi_nodes, values):
        from scipy.interpolate import RegularGridInterpolator

        r_nodes = np.asarray(r_nodes, float)
        phi_nodes = np.asarray(phi_nodes, float)
        values = np.asarray(values, float)
        interp = RegularGridInterpolator(
            (r_nodes, phi_nodes), values, method="linear", bounds_error=False, fill_value=None
        )

        def f(y, z):
            y, z = np.broadcast_arrays(y, z)
            r = np.clip(np.hypot(y, z), r_nodes[0], r_nodes[-1])
            ph = np.mod(np.arctan2(z, y), 2 * math.pi)
            ph = np.clip(ph, phi_nodes[0], phi_nodes[-1])
            return interp(np.column_stack([r.ravel(), ph.ravel()])).reshape(r.shape)

        return cls(f)


def _zero_func(y, z):
    return np.zeros(np.broadcast(y, z).shape)


_zero_func._is_zero = True
PlaneData.ZERO = PlaneData(_zero_func)


# --------------------------------------------------------------------------
# surface layer potentials

def _kernel_block(kind, grid, targets, sp, layer):
    nodes = grid.points[None, :, :]
    tg = targets[:, None, :]
    if layer == "double":
        k = conormal(kind, nodes, grid.normals[None, :, :], tg, sp)
    else:
        k = fundamental(kind, tg, nodes, sp)
    return np.asarray(k) * grid.weights[None, :]


def _layer_matrix(kind, grid, targets, sp, layer):
    kind = KernelKind.coerce(kind)
    sp = SingularityParams.coerce(sp)
    targets = as_points(targets)
    out = _parallel.empty(targets.shape[0], grid.size)
    return _parallel.fill_rows(
        out, lambda i0, i1: _kernel_block(kind, grid, targets[i0:i1], sp, layer)
    )


def double_layer_matrix(kind, grid, targets, sp):
    """Matrix M with (M mu)[i] = sum_j w_j B_nu[q](node_j; target_i) mu_j."""
    return _layer_matrix(kind, grid, targets, sp, "double")


def single_layer_matrix(kind, grid, targets, sp):
    return _layer_matrix(kind, grid, targets, sp, "single")


def _density_values(mu, grid):
    if isinstance(mu, DensityVector):
        if mu.grid is not grid and mu.grid.size != grid.size:
            raise ParameterError("density belongs to a different grid")
        return mu.values
    v = np.asarray(mu, float).ravel()
    if v.size == 1:
        return np.full(grid.size, float(v[0]))
    if v.size != grid.size:
        raise ParameterError(f"density has {v.size} values, grid has {grid.size} nodes")
    return v


def _grid_of(mu, grid):
    if grid is None:
        if not isinstance(mu, DensityVector):
            raise ParameterError("pass a DensityVector or an explicit grid")
        return mu.grid
    return grid


def _maybe_scalar(values, targets):
    return float(values[0]) if np.ndim(targets) == 1 else values


def eval_double_layer(kind, mu, target, sp, grid=None):
    """w(target) = sum_j w_j B_nu[q](node_j; target) mu_j."""
    grid = _grid_of(mu, grid)
    m = _density_values(mu, grid)
    vals = double_layer_matrix(kind, grid, target, sp) @ m
    return _maybe_scalar(vals, target)


def eval_single_layer(kind, rho, target, sp, grid=None):
    """v(target) = sum_j w_j q(target, node_j) rho_j."""
    grid = _grid_of(rho, grid)
    r = _density_values(rho, grid)
    if not np.any(r):
        return _maybe_scalar(np.zeros(as_points(target).shape[0]), target)
    vals = single_layer_matrix(kind, grid, target, sp) @ r
    return _maybe_scalar(vals, target)


def eval_single_layer_conormal(kind, rho, target, normal_at_target, sp, grid=None):
    """B_n[v](target) with the conormal taken at the target (field) point."""
    kind = KernelKind.coerce(kind)
    grid = _grid_of(rho, grid)
    r = _density_values(rho, grid)
    targets = as_points(target)
    normals = np.broadcast_to(np.asarray(normal_at_target, float), targets.shape)
    if not np.any(r):
        return _maybe_scalar(np.zeros(targets.shape[0]), target)
    out = np.empty(targets.shape[0])
    for i0, i1 in _parallel.row_blocks(targets.shape[0], grid.size):
        k = conormal(
            kind, targets[i0:i1, None, :], normals[i0:i1, None, :], grid.points[None, :, :], sp
        )
        out[i0:i1] = (np.asarray(k) * grid.weights[None, :]) @ r
    return _maybe_scalar(out, target)


def gauss_flux(kind, grid, target, sp):
    """Double-layer potential of the unit density.

    Q1: -1 inside D (and on X), -1/2 on the surface, 0 outside.
    Q2: i(target) - 1, i - 1/2, i respectively (see ``plane_flux_i``).
    """
    return eval_double_layer(kind, np.ones(grid.size), target, sp, grid=grid)


# --------------------------------------------------------------------------
# one-sided limits on the surface

def _interp_matrix(coarse, fine):
    from scipy.interpolate import BarycentricInterpolator

    return BarycentricInterpolator(coarse, np.eye(coarse.size))(fine)


def density_interpolant(grid: QuadratureGrid, values):
    """Tensor Lagrange interpolant (s, t) -> density through the grid nodes.

    Polynomial interpolation is well conditioned on Gauss-Legendre nodes;
    on a periodic s-rule it is still usable for smooth data but less so.
    """
    ns, nt = grid.shape
    v = _density_values(values, grid).reshape(ns, nt)
    s_c = grid.params[:, 0].reshape(ns, nt)[:, 0]
    t_c = grid.params[:, 1].reshape(ns, nt)[0]

    def f(s, t):
        s = np.asarray(s, float).ravel()
        t = np.asarray(t, float).ravel()
        Ls = _interp_matrix(s_c, s)
        Lt = _interp_matrix(t_c, t)
        return np.einsum("mi,ij,mj->m", Ls, v, Lt)

    return f


PANEL_ORDER = 8
MAX_DEPTH = 12


def _panel_rule(surface, boxes, order=PANEL_ORDER):
    """Gauss-Legendre nodes on parameter boxes (n, 4) = (s0, s1, t0, t1)."""
    x, w = np.polynomial.legendre.leggauss(order)
    u = 0.5 * (x + 1.0)
    hs = boxes[:, 1] - boxes[:, 0]
    ht = boxes[:, 3] - boxes[:, 2]
    S = boxes[:, 0, None, None] + hs[:, None, None] * u[None, :, None]
    T = boxes[:, 2, None, None] + ht[:, None, None] * u[None, None, :]
    S, T = np.broadcast_arrays(S, T)
    W = 0.25 * (hs * ht)[:, None, None] * np.outer(w, w)[None]
    pts = surface.point(S, T).reshape(-1, 3)
    ps, pt = surface.derivatives(S, T)
    cross = np.cross(ps, pt).reshape(-1, 3)
    jac = np.linalg.norm(cross, axis=1)
    normals = surface.orientation * cross / jac[:, None]
    return pts, W.ravel() * jac, normals, np.column_stack([S.ravel(), T.ravel()])


def _box_diameter(surface, boxes):
    s_mid = 0.5 * (boxes[:, 0] + boxes[:, 1])
    t_mid = 0.5 * (boxes[:, 2] + boxes[:, 3])
    corners = [
        surface.point(boxes[:, i], boxes[:, j]) for i in (0, 1) for j in (2, 3)
    ] + [surface.point(s_mid, boxes[:, 2]), surface.point(s_mid, boxes[:, 3]),
         surface.point(boxes[:, 0], t_mid), surface.point(boxes[:, 1], t_mid)]
    c = np.stack(corners, axis=1)
    centre = surface.point(s_mid, t_mid)
    diam = np.linalg.norm(c[:, :, None, :] - c[:, None, :, :], axis=-1).max(axis=(1, 2))
    return centre, diam


def adaptive_panels(surface, target, base=(8, 4), ratio=1.0, max_depth=MAX_DEPTH):
    """Quadtree of parameter boxes refined toward ``target``.

    A box is split while the target lies within ``ratio`` box diameters of
    its centre, so each Gauss panel sees the target from a safe distance.
    """
    s0, s1 = surface.s_range
    t0, t1 = surface.t_range
    ss = np.linspace(s0, s1, base[0] + 1)
    ts = np.linspace(t0, t1, base[1] + 1)
    boxes = np.array([[ss[i], ss[i + 1], ts[j], ts[j + 1]] for i in range(base[0]) for j in range(base[1])])
    done = []
    for _ in range(max_depth):
        centre, diam = _box_diameter(surface, boxes)
        near = np.linalg.norm(centre - target, axis=1) < ratio * diam
        done.append(boxes[~near])
        if not near.any():
            break
        b = boxes[near]
        sm = 0.5 * (b[:, 0] + b[:, 1])
        tm = 0.5 * (b[:, 2] + b[:, 3])
        boxes = np.concatenate([
            np.column_stack([b[:, 0], sm, b[:, 2], tm]),
            np.column_stack([sm, b[:, 1], b[:, 2], tm]),
            np.column_stack([b[:, 0], sm, tm, b[:, 3]]),
            np.column_stack([sm, b[:, 1], tm, b[:, 3]]),
        ])
    else:
        done.append(boxes)
    return np.concatenate(done)


def _density_fn(grid, density):
    """Density as a function of (points, params) for the adaptive rule."""
    if callable(density):
        return lambda pts, prm: np.asarray(density(pts), float)
    interp = density_interpolant(grid, density)
    return lambda pts, prm: interp(prm[:, 0], prm[:, 1])


def adaptive_layer(kind, layer, density, targets, sp, grid=None, surface=None, normals=None):
    """Layer potential at targets near the surface by adaptive panel quadrature.

    ``layer`` is "double", "single" or "single-conormal" (conormal taken at
    the target along ``normals``).  ``density`` is a callable of surface
    points or nodal values on ``grid`` (interpolated).
    """
    kind = KernelKind.coerce(kind)
    sp = SingularityParams.coerce(sp)
    targets = as_points(targets)
    surface = surface if surface is not None else grid.surface
    if surface is None:
        raise ParameterError("adaptive evaluation needs the parametric surface")
    dens = _density_fn(grid, density)
    out = np.empty(targets.shape[0])
    for i, p in enumerate(targets):
        boxes = adaptive_panels(surface, p)
        pts, w, nrm, prm = _panel_rule(surface, boxes)
        f = dens(pts, prm)
        if layer == "double":
            k = conormal(kind, pts, nrm, p, sp)
        elif layer == "single":
            k = fundamental(kind, p, pts, sp)
        elif layer == "single-conormal":
            k = conormal(kind, p, normals[i], pts, sp)
        else:
            raise ParameterError(f"unknown layer {layer!r}")
        out[i] = np.dot(np.asarray(k) * w, f)
    return out


OFFSETS = (1.0, 0.5, 0.25)


def richardson(f1, f2, f3):
    """Value at 0 from samples at offsets h, h/2, h/4 (removes O(h), O(h^2))."""
    return (8.0 * f3 - 6.0 * f2 + f1) / 3.0


def _offset_points(grid, nodes, side):
    if side not in ("inside", "outside"):
        raise ParameterError(f"side must be 'inside' or 'outside', got {side!r}")
    sign = -1.0 if side == "inside" else 1.0
    nodes = np.atleast_1d(nodes)
    p = grid.points[nodes]
    n = grid.normals[nodes]
    h = grid.mesh_width[nodes][:, None]
    return [p + sign * k * h * n for k in OFFSETS], n


def _limit(kind, layer, density, nodes, sp, side, grid):
    pts, n = _offset_points(grid, nodes, side)
    vals = [adaptive_layer(kind, layer, density, q, sp, grid=grid, normals=n) for q in pts]
    return richardson(*vals)


def double_layer_limit(kind, mu, nodes, sp, side, grid=None):
    """One-sided limit of the double layer at surface nodes.

    Evaluated at offsets {h, h/2, h/4} along the normal (h = local mesh
    width) by adaptive panel quadrature, then extrapolated to the surface.
    """
    grid = _grid_of(mu, grid)
    return _limit(kind, "double", mu, nodes, sp, side, grid)


def single_layer_limit(kind, rho, nodes, sp, side, grid=None):
    grid = _grid_of(rho, grid)
    return _limit(kind, "single", rho, nodes, sp, side, grid)


def single_layer_conormal_limit(kind, rho, nodes, sp, side, grid=None):
    """One-sided limit of B_n[v] at surface nodes (n = node normal)."""
    grid = _grid_of(rho, grid)
    return _limit(kind, "single-conormal", rho, nodes, sp, side, grid)


# --------------------------------------------------------------------------
# planar potentials over the disk X

def _ray_disk(yz, radius, theta):
    """Entry/exit distances of rays from ``yz`` (n, 2) in directions ``theta``."""
    u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    b = yz @ u.T
    c = np.einsum("ij,ij->i", yz, yz)[:, None] - radius**2
    disc = b * b - c
    hit = disc > 0
    sq = np.sqrt(np.where(hit, disc, 0.0))
    r1 = np.where(hit, np.maximum(-b - sq, 0.0), 0.0)
    r2 = np.where(hit, np.maximum(-b + sq, 0.0), 0.0)
    return r1, r2


def disk_kernel_integral(targets, radius, antiderivative, n_theta=N_THETA):
    """Integral over the disk of radius ``radius`` of a radial kernel.

    For each target (x, y, z), integrates k(rho) over the disk in polar
    coordinates centred at (y, z); ``antiderivative(x, rho)`` is any
    primitive of ``rho * k(rho)``.  The remaining angular integral is smooth
    and periodic, done with the trapezoid rule on ``n_theta`` points.
    """
    targets = as_points(targets)
    theta = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
    r1, r2 = _ray_disk(targets[:, 1:], float(radius), theta)
    x = targets[:, 0:1]
    vals = antiderivative(x, r2) - antiderivative(x, r1)
    return vals.mean(axis=1) * TWO_PI


def _prim_holmgren(a):
    # rho (x^2 + rho^2)^{-1/2-a}
    return lambda x, rho: (x * x + rho * rho) ** (0.5 - a) / (1 - 2 * a)


def _prim_holmgren_flux(a):
    # rho (x^2 + rho^2)^{-3/2-a}
    return lambda x, rho: -((x * x + rho * rho) ** (-0.5 - a)) / (1 + 2 * a)


def _prim_dirichlet(a):
    # rho (x^2 + rho^2)^{a-3/2}
    return lambda x, rho: -((x * x + rho * rho) ** (a - 0.5)) / (1 - 2 * a)


def _positive_x(targets):
    targets = as_points(targets)
    if np.any(targets[:, 0] <= 0):
        raise DomainError("planar potentials need target.x > 0")
    return targets


def plane_flux_i(target, disk_grid, sp):
    """i(x,y,z) = (1-2a)/(2pi) x^{1-2a} integral over X of [x^2 + |.|^2]^{a-3/2}.

    Plain quadrature on ``disk_grid``; see ``plane_flux_i_exact`` for the
    version that stays accurate as x -> 0.
    """
    a = SingularityParams.coerce(sp).alpha
    targets = _positive_x(target)
    x = targets[:, 0:1]
    d2 = _plane_dist2(targets, disk_grid)
    k = (x * x + d2) ** (a - 1.5)
    vals = (1 - 2 * a) / TWO_PI * x[:, 0] ** (1 - 2 * a) * (k @ disk_grid.weights)
    return _maybe_scalar(vals, target)


def plane_flux_i_exact(target, radius, sp, n_theta=N_THETA):
    """i(x,y,z) for the disk of radius ``radius`` by exact radial integration."""
    a = SingularityParams.coerce(sp).alpha
    targets = _positive_x(target)
    x = targets[:, 0]
    vals = (1 - 2 * a) / TWO_PI * x ** (1 - 2 * a) * disk_kernel_integral(
        targets, radius, _prim_dirichlet(a), n_theta
    )
    return _maybe_scalar(vals, target)


def _plane_dist2(targets, disk_grid):
    dy = targets[:, None, 1] - disk_grid.points[None, :, 1]
    dz = targets[:, None, 2] - disk_grid.points[None, :, 2]
    return dy * dy + dz * dz


def _plane_values(data, points):
    if isinstance(data, PlaneData):
        return data(points[:, 1], points[:, 2])
    if callable(data):
        return np.asarray(data(points[:, 1], points[:, 2]), float)
    v = np.asarray(data, float)
    return np.broadcast_to(v, (points.shape[0],)) if v.size == 1 else v


def _disk_quadrature(data, disk_grid, targets, kernel):
    """sum_j w_j k(x, |p' - node_j|^2) f_j on the disk grid."""
    f_nodes = _plane_values(data, disk_grid.points)
    K = kernel(targets[:, 0:1], _plane_dist2(targets, disk_grid))
    return K @ (disk_grid.weights * f_nodes)


def _polar_rule(data, targets, radius, power, r_break=None, n_theta=N_POLAR_THETA, n_s=N_POLAR_S):
    """Target-centred polar integral of (f - f(p')) * rho * (x^2 + rho^2)^{power / 2}.

    In the variable rho = x sinh(s) the weight becomes
    x^{power + 2} sinh(s) cosh(s)^{power + 1}, which is bounded and
    resolves the scale rho ~ x however small x is.  Rays are split where
    they cross the circle ``r_break``.  Returns the integral divided by
    x^{power + 2}.
    """
    ts, tw = np.polynomial.legendre.leggauss(n_s)
    theta = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
    ct, st = np.cos(theta), np.sin(theta)
    out = np.empty(targets.shape[0])
    step = max(1, _parallel.BLOCK_PAIRS // (n_theta * 3 * n_s))
    for i0 in range(0, targets.shape[0], step):
        tg = targets[i0:i0 + step]
        x = tg[:, 0:1]
        yz = tg[:, 1:]
        r1, r2 = _ray_disk(yz, radius, theta)
        if r_break is not None:
            b1, b2 = _ray_disk(yz, r_break, theta)
            b1, b2 = np.clip(b1, r1, r2), np.clip(b2, r1, r2)
            b1 = np.where(b2 > b1, b1, r1)
            b2 = np.where(b2 > b1, b2, r1)
            edges = [r1, b1, b2, r2]
        else:
            edges = [r1, r2]
        proj = np.column_stack([np.zeros(tg.shape[0]), yz])
        f0 = _plane_values(data, proj)[:, None, None]
        acc = np.zeros(tg.shape[0])
        for lo, hi in zip(edges[:-1], edges[1:]):
            s_lo, s_hi = np.arcsinh(lo / x), np.arcsinh(hi / x)
            half = 0.5 * (s_hi - s_lo)
            sv = s_lo[..., None] + half[..., None] * (ts + 1.0)
            rho = x[..., None] * np.sinh(sv)
            py = yz[:, 0, None, None] + rho * ct[None, :, None]
            pz = yz[:, 1, None, None] + rho * st[None, :, None]
            pts = np.column_stack([np.zeros(py.size), py.ravel(), pz.ravel()])
            f = _plane_values(data, pts).reshape(py.shape)
            wgt = np.sinh(sv) * np.cosh(sv) ** (power + 1)
            acc += ((f - f0) * wgt * tw * half[..., None]).sum(axis=(1, 2))
        out[i0:i0 + step] = acc * (TWO_PI / n_theta)
    return out


def plane_potential_holmgren(nu1, disk_grid, target, sp, subtract=True):
    """v1 = -(1/2pi) integral over X of nu1(eta,zeta) [x^2+|.|^2]^{-1/2-a}."""
    a = SingularityParams.coerce(sp).alpha
    targets = _positive_x(target)
    if isinstance(nu1, PlaneData) and nu1.is_zero:
        return _maybe_scalar(np.zeros(targets.shape[0]), target)
    x = targets[:, 0]
    if subtract and callable(nu1):
        f0 = _plane_values(nu1, np.column_stack([np.zeros_like(x), targets[:, 1:]]))
        exact = disk_kernel_integral(targets, disk_grid.radius, _prim_holmgren(a))
        rest = x ** (1 - 2 * a) * _polar_rule(nu1, targets, disk_grid.radius, -1.0 - 2 * a)
        return _maybe_scalar(-(rest + f0 * exact) / TWO_PI, target)
    vals = _disk_quadrature(nu1, disk_grid, targets, lambda x, d2: (x * x + d2) ** (-0.5 - a))
    return _maybe_scalar(-vals / TWO_PI, target)


def plane_potential_holmgren_flux(nu1, disk_grid, target, sp, subtract=True):
    """x^{2a} dv1/dx = (1+2a)/(2pi) x^{1+2a} integral of nu1 [x^2+|.|^2]^{-3/2-a}.

    Tends to nu1(y0, z0) as the target approaches (0, y0, z0) in X.  With
    ``subtract`` (callable data) a target-centred polar rule is used, which
    stays accurate for any x > 0; otherwise plain quadrature on ``disk_grid``.
    """
    a = SingularityParams.coerce(sp).alpha
    targets = _positive_x(target)
    if isinstance(nu1, PlaneData) and nu1.is_zero:
        return _maybe_scalar(np.zeros(targets.shape[0]), target)
    x = targets[:, 0]
    c = (1 + 2 * a) / TWO_PI
    if subtract and callable(nu1):
        f0 = _plane_values(nu1, np.column_stack([np.zeros_like(x), targets[:, 1:]]))
        exact = x ** (1 + 2 * a) * disk_kernel_integral(targets, disk_grid.radius, _prim_holmgren_flux(a))
        rest = _polar_rule(nu1, targets, disk_grid.radius, -3.0 - 2 * a)
        return _maybe_scalar(c * (rest + f0 * exact), target)
    vals = _disk_quadrature(nu1, disk_grid, targets, lambda x, d2: (x * x + d2) ** (-1.5 - a))
    return _maybe_scalar(c * x ** (1 + 2 * a) * vals, target)


def dirichlet_extension_grid(shadow_radius, Nr, Nphi, factor=1.5):
    """Disk grid of radius ``factor * shadow_radius`` for the extended tau1.

    The radial rule breaks at the shadow radius, where the clamped
    extension has a kink.
    """
    r0 = float(shadow_radius)
    return build_disk_grid(factor * r0, Nr, Nphi, r_break=r0)


def radial_clamp(data, radius):
    """Extend plane data beyond the disk by its value on the rim (same angle)."""

    def f(y, z):
        y, z = np.broadcast_arrays(np.asarray(y, float), np.asarray(z, float))
        rho = np.hypot(y, z)
        scale = np.where(rho > radius, radius / np.where(rho > 0, rho, 1.0), 1.0)
        return _plane_values(data, np.column_stack([np.zeros(y.size), (y * scale).ravel(), (z * scale).ravel()])).reshape(y.shape)

    return PlaneData(f)


def plane_potential_dirichlet(tau1, disk_grid, target, sp, subtract=True, shadow_radius=None):
    """v2 = (1-2a)/(2pi) x^{1-2a} integral of tau1 [x^2+|.|^2]^{a-3/2}.

    ``disk_grid`` should cover the extended disk (only its radius is used
    by the default target-centred polar rule); when ``shadow_radius`` is
    given, tau1 is continued outside it by radial clamping.  v2 -> tau1 as
    x -> 0 inside X.
    """
    a = SingularityParams.coerce(sp).alpha
    targets = _positive_x(target)
    if isinstance(tau1, PlaneData) and tau1.is_zero:
        return _maybe_scalar(np.zeros(targets.shape[0]), target)
    data = tau1
    if shadow_radius is not None:
        data = radial_clamp(tau1, shadow_radius)
    x = targets[:, 0]
    c = (1 - 2 * a) / TWO_PI
    if subtract and callable(data):
        f0 = _plane_values(data, np.column_stack([np.zeros_like(x), targets[:, 1:]]))
        exact = x ** (1 - 2 * a) * disk_kernel_integral(targets, disk_grid.radius, _prim_dirichlet(a))
        rest = _polar_rule(data, targets, disk_grid.radius, 2 * a - 3.0, r_break=shadow_radius)
        return _maybe_scalar(c * (rest + f0 * exact), target)
    vals = _disk_quadrature(data, disk_grid, targets, lambda x, d2: (x * x + d2) ** (a - 1.5))
    return _maybe_scalar(c * x ** (1 - 2 * a) * vals, target)
