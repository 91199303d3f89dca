"""Half-ball oracles: Green functions by inversion and explicit solution formulas.

The half-ball is x^2 + y^2 + z^2 < a^2, x > 0.  Inverting the pole p0 in
the sphere, p0_bar = (a/R)^2 p0 with R = |p0|, gives Green functions that
vanish on the hemisphere:

    G01 = q1(p, p0) - (a/R)^(1+2a) q1(p, p0_bar)     (x^(2a) dG01/dx = 0 on x = 0)
    G02 = q2(p, p0) - (a/R)^(1+2a) q2(p, p0_bar)     (G02 = 0 on x = 0)

Green's formula then gives u(p0) as a disk integral of the plane data plus
a hemisphere integral of phi against -B_nu[G].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import DomainError, ParameterError
from .geometry import (
    QuadratureGrid,
    as_points,
    build_disk_grid,
    build_surface_grid,
    make_hemisphere,
)
from .kernels import SingularityParams, conormal_q1, conormal_q2, q1, q2
from .potentials import PlaneData, plane_potential_dirichlet, plane_potential_holmgren
from .specfun import hyp2f1

__all__ = [
    "HalfBall",
    "inverse_point",
    "green_g01",
    "green_g02",
    "holmgren_plane_kernel",
    "dirichlet_plane_kernel",
    "holmgren_surface_kernel",
    "dirichlet_surface_kernel",
    "printed_plane_bracket",
    "printed_holmgren_surface_kernel",
    "printed_dirichlet_surface_kernel",
    "poisson_holmgren",
    "poisson_dirichlet",
]

TWO_PI = 2.0 * math.pi
INTERIOR_MARGIN = 1e-9


@dataclass(frozen=True)
class HalfBall:
    """Half-ball of radius ``a`` with default quadrature sizes for the oracles."""

    a: float
    n_s: int = 32
    n_t: int = 32
    n_r: int = 48
    n_phi: int = 64

    def __post_init__(self):
        if not self.a > 0:
            raise ParameterError(f"half-ball radius must be positive, got a={self.a!r}")

    @property
    def surface(self):
        return make_hemisphere(self.a)

    def surface_grid(self) -> QuadratureGrid:
        return build_surface_grid(self.surface, self.n_s, self.n_t)

    def disk_grid(self) -> QuadratureGrid:
        return build_disk_grid(self.a, self.n_r, self.n_phi)

    def contains(self, p):
        p = as_points(p)
        return (p[:, 0] > 0) & (np.linalg.norm(p, axis=1) < self.a * (1 - INTERIOR_MARGIN))


def _radius(hb):
    return hb.a if isinstance(hb, HalfBall) else float(hb)


def inverse_point(p0, a):
    """Inversion in the sphere of radius a and the image weight a/R."""
    p0 = np.asarray(p0, float)
    R2 = np.sum(p0 * p0, axis=-1, keepdims=True)
    if np.any(R2 == 0):
        raise DomainError("the centre of the ball has no inverse point")
    return p0 * (a * a / R2), np.sqrt(a * a / R2[..., 0])


def green_g01(p, p0, hb, sp):
    """Green function of the Holmgren problem in the half-ball."""
    a = SingularityParams.coerce(sp).alpha
    p0b, ratio = inverse_point(p0, _radius(hb))
    return q1(p, p0, sp) - ratio ** (1 + 2 * a) * q1(p, p0b, sp)


def green_g02(p, p0, hb, sp):
    """Green function of the Dirichlet problem in the half-ball.

    The image weight is (a/R)^(1+2a), the same as for G01; it is the only
    power that makes G02 vanish on the sphere.
    """
    a = SingularityParams.coerce(sp).alpha
    p0b, ratio = inverse_point(p0, _radius(hb))
    return q2(p, p0, sp) - ratio ** (1 + 2 * a) * q2(p, p0b, sp)


# --------------------------------------------------------------------------
# kernels of the solution formulas

def holmgren_plane_kernel(yz, p0, hb, sp):
    """G01((0, y, z); p0): u gets  -integral over X of nu1 * kernel."""
    yz = np.asarray(yz, float)
    pts = np.concatenate([np.zeros(yz.shape[:-1] + (1,)), yz], axis=-1)
    return green_g01(pts, p0, hb, sp)


def dirichlet_plane_kernel(yz, p0, hb, sp):
    """lim_{x->0} x^(2a) dG02/dx at (0, y, z): u gets  +integral of tau1 * kernel."""
    a = SingularityParams.coerce(sp).alpha
    rad = _radius(hb)
    yz = np.asarray(yz, float)
    p0 = np.asarray(p0, float)
    x0 = p0[..., 0]
    d2 = (yz[..., 0] - p0[..., 1]) ** 2 + (yz[..., 1] - p0[..., 2]) ** 2
    direct = (x0 * x0 + d2) ** (a - 1.5)
    R2 = np.sum(p0 * p0, axis=-1)
    b2 = np.sum(yz * yz, axis=-1)
    dot = yz[..., 0] * p0[..., 1] + yz[..., 1] * p0[..., 2]
    image = (rad * rad - 2 * dot + b2 * R2 / (rad * rad)) ** (a - 1.5)
    return (1 - 2 * a) / TWO_PI * x0 ** (1 - 2 * a) * (direct - image)


def _surface_conormal(fn, xi, normal, p0, hb, sp):
    a = SingularityParams.coerce(sp).alpha
    p0b, ratio = inverse_point(p0, _radius(hb))
    return fn(xi, normal, p0, sp) - ratio ** (1 + 2 * a) * fn(xi, normal, p0b, sp)


def holmgren_surface_kernel(xi, normal, p0, hb, sp):
    """-B_nu[G01](xi; p0) on the hemisphere: u gets  +integral of phi * kernel."""
    return -_surface_conormal(conormal_q1, xi, normal, p0, hb, sp)


def dirichlet_surface_kernel(xi, normal, p0, hb, sp):
    """-B_nu[G02](xi; p0) on the hemisphere."""
    return -_surface_conormal(conormal_q2, xi, normal, p0, hb, sp)


def printed_plane_bracket(yz, p0, inv_radius):
    """(b' - y y0/b')^2 + (b' - z z0/b')^2 + (x0^2 y^2 + ...)/b'^2 - b'^2 with b' = ``inv_radius``.

    Equals a^2 - 2 p.p0 + |p|^2 R^2 / a^2 when ``inv_radius`` is the ball radius.
    """
    yz = np.asarray(yz, float)
    p0 = np.asarray(p0, float)
    y, z = yz[..., 0], yz[..., 1]
    x0, y0, z0 = p0[..., 0], p0[..., 1], p0[..., 2]
    b = np.asarray(inv_radius, float)
    return (
        (b - y * y0 / b) ** 2
        + (b - z * z0 / b) ** 2
        + (x0**2 * y**2 + y**2 * z0**2 + x0**2 * z**2 + y0**2 * z**2) / b**2
        - b**2
    )


def printed_holmgren_surface_kernel(xi, p0, hb, sp):
    """(1+2a)/(2pi) xi^(2a) F(3/2+a, a; 2a; 1 - r1^2/r^2) (c^2 - R^2)/(c r^(3+2a)), c = |xi|."""
    a = SingularityParams.coerce(sp).alpha
    xi = np.asarray(xi, float)
    p0 = np.asarray(p0, float)
    r2, r12 = _r2_r12(xi, p0)
    c = np.linalg.norm(xi, axis=-1)
    R2 = np.sum(p0 * p0, axis=-1)
    F = hyp2f1(1.5 + a, a, 2 * a, 1 - r12 / r2)
    return (1 + 2 * a) / TWO_PI * xi[..., 0] ** (2 * a) * F * (c * c - R2) / (c * r2 ** (1.5 + a))


def printed_dirichlet_surface_kernel(xi, p0, hb, sp):
    """(3-2a)/(2pi) x0^(1-2a) xi F(5/2-a, 1-a; 2-2a; 1 - r1^2/r^2) (c^2 - R^2)/(c r^(5-2a))."""
    a = SingularityParams.coerce(sp).alpha
    xi = np.asarray(xi, float)
    p0 = np.asarray(p0, float)
    r2, r12 = _r2_r12(xi, p0)
    c = np.linalg.norm(xi, axis=-1)
    R2 = np.sum(p0 * p0, axis=-1)
    F = hyp2f1(2.5 - a, 1 - a, 2 - 2 * a, 1 - r12 / r2)
    return (
        (3 - 2 * a) / TWO_PI * p0[..., 0] ** (1 - 2 * a) * xi[..., 0] * F
        * (c * c - R2) / (c * r2 ** (2.5 - a))
    )


def _r2_r12(xi, p0):
    d = xi - p0
    r2 = np.sum(d * d, axis=-1)
    return r2, r2 + 4 * xi[..., 0] * p0[..., 0]


# --------------------------------------------------------------------------
# solution formulas

def _targets(hb, p0):
    pts = as_points(p0)
    if not np.all(hb.contains(pts)):
        raise DomainError("p0 must lie strictly inside the half-ball")
    return pts


def _surface_values(phi, grid):
    if callable(phi):
        return np.asarray(phi(grid.points), float).reshape(grid.size)
    v = np.asarray(phi, float)
    return np.full(grid.size, float(v)) if v.size == 1 else v.reshape(grid.size)


def _image_plane_term(kind, data_values, disk, pts, hb, sp):
    """Disk integral of data times the (smooth) image part of the plane kernel."""
    a = SingularityParams.coerce(sp).alpha
    rad = _radius(hb)
    yz = disk.points[:, 1:]
    R2 = np.sum(pts * pts, axis=1)[:, None]
    b2 = np.sum(yz * yz, axis=1)[None, :]
    dot = pts[:, 1:] @ yz.T
    bracket = rad * rad - 2 * dot + b2 * R2 / (rad * rad)
    if kind == "holmgren":
        # (a/R)^(1+2a) q1((0,y,z); p0_bar) = (1/2pi) bracket^(-1/2-a)
        k = bracket ** (-0.5 - a) / TWO_PI
    else:
        k = (1 - 2 * a) / TWO_PI * pts[:, 0:1] ** (1 - 2 * a) * bracket ** (a - 1.5)
    return k @ (disk.weights * data_values)


def _plane_data(data):
    if data is None:
        return None
    if isinstance(data, PlaneData):
        return None if data.is_zero else data
    if callable(data):
        return PlaneData(data)
    return None if float(data) == 0.0 else PlaneData.constant(data)


def _surface_term(kernel_fn, phi, grid, pts, hb, sp, mass):
    """Hemisphere integral of phi * kernel with the value at the nearest node subtracted.

    ``mass`` is the exact integral of the kernel over the hemisphere for
    each p0; adding back phi(nearest) * mass removes the near-boundary
    quadrature error of the peaked kernel.
    """
    ph = _surface_values(phi, grid)
    K = np.asarray(kernel_fn(grid.points[None, :, :], grid.normals[None, :, :], pts[:, None, :], hb, sp))
    K = K * grid.weights[None, :]
    near = np.argmin(((pts[:, None, :] - grid.points[None, :, :]) ** 2).sum(-1), axis=1)
    ph0 = ph[near]
    return K @ ph - ph0 * K.sum(axis=1) + ph0 * mass


def poisson_holmgren(hb: HalfBall, nu1, phi, p0, sp, grid=None, disk=None):
    """u(p0) = -integral_X nu1 G01 + integral_Gamma phi (-B_nu[G01]).

    The direct part of the plane term is the planar potential v1; the image
    part is smooth.  The surface kernel integrates to 1 (u = 1 solves the
    problem with nu1 = 0).
    """
    pts = _targets(hb, p0)
    grid = grid if grid is not None else hb.surface_grid()
    disk = disk if disk is not None else hb.disk_grid()
    u = _surface_term(holmgren_surface_kernel, phi, grid, pts, hb, sp, 1.0)
    nu = _plane_data(nu1)
    if nu is not None:
        u = u + plane_potential_holmgren(nu, disk, pts, sp)
        u = u + _image_plane_term("holmgren", nu(disk.points[:, 1], disk.points[:, 2]), disk, pts, hb, sp)
    return float(u[0]) if np.ndim(p0) == 1 else u


def poisson_dirichlet(hb: HalfBall, tau1, phi, p0, sp, grid=None, disk=None):
    """u(p0) = integral_X tau1 (x^(2a) dG02/dx)|_{x=0} + integral_Gamma phi (-B_nu[G02]).

    The direct part of the plane term is the planar potential v2 over the
    disk itself (no extension needed); the image part is smooth.  The
    surface kernel integrates to 1 minus the plane term of tau1 = 1.
    """
    pts = _targets(hb, p0)
    grid = grid if grid is not None else hb.surface_grid()
    disk = disk if disk is not None else hb.disk_grid()
    one = np.ones(disk.size)
    plane_one = plane_potential_dirichlet(PlaneData.constant(1.0), disk, pts, sp)
    plane_one = plane_one - _image_plane_term("dirichlet", one, disk, pts, hb, sp)
    u = _surface_term(dirichlet_surface_kernel, phi, grid, pts, hb, sp, 1.0 - plane_one)
    tau = _plane_data(tau1)
    if tau is not None:
        u = u + plane_potential_dirichlet(tau, disk, pts, sp)
        u = u - _image_plane_term("dirichlet", tau(disk.points[:, 1], disk.points[:, 2]), disk, pts, hb, sp)
    return float(u[0]) if np.ndim(p0) == 1 else u
