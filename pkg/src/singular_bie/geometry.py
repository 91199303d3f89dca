"""Surfaces in the half-space x > 0, planar regions in x = 0, quadrature grids."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .exceptions import DomainError, ParameterError

__all__ = [
    "HalfSpacePoint",
    "ParamSurface",
    "PlanarRegion",
    "QuadratureGrid",
    "as_points",
    "make_hemisphere",
    "make_tabulated_surface",
    "build_surface_grid",
    "build_disk_grid",
    "check_orthogonality",
]


class HalfSpacePoint(NamedTuple):
    x: float
    y: float
    z: float

    @classmethod
    def checked(cls, x, y, z):
        if x < 0:
            raise DomainError(f"points must satisfy x >= 0, got x={x:g}")
        return cls(float(x), float(y), float(z))


def as_points(p, allow_plane=True) -> np.ndarray:
    """Coerce a point or a stack of points to a float array of shape (n, 3)."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise DomainError(f"expected points of shape (n, 3), got {arr.shape}")
    if np.any(arr[:, 0] < 0) or (not allow_plane and np.any(arr[:, 0] == 0)):
        raise DomainError("points must lie in the half-space x >= 0")
    return arr


Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ParamSurface:
    """Parametric surface over the box ``s_range x t_range``.

    ``point(s, t)`` returns an array of shape ``s.shape + (3,)``.  When
    ``partials`` is None the derivatives are taken by central differences
    with step ``1e-6`` times the parameter range.  ``orientation`` flips the
    sign of ``p_s x p_t`` so the stored normal points out of the domain.
    The rim curve (x = 0) is the parameter line ``t = edge_t``.
    """

    s_range: tuple
    t_range: tuple
    point: Evaluator
    partials: Optional[Callable] = None
    orientation: int = 1
    edge_t: Optional[float] = None
    meets_plane_orthogonally: bool = True
    rim_radius: Optional[float] = None
    name: str = "surface"

    def derivatives(self, s, t):
        if self.partials is not None:
            return self.partials(s, t)
        hs = 1e-6 * (self.s_range[1] - self.s_range[0])
        ht = 1e-6 * (self.t_range[1] - self.t_range[0])
        ps = (self.point(s + hs, t) - self.point(s - hs, t)) / (2 * hs)
        pt = (self.point(s, t + ht) - self.point(s, t - ht)) / (2 * ht)
        return ps, pt


def make_hemisphere(a: float) -> ParamSurface:
    """Hemisphere x^2 + y^2 + z^2 = a^2, x >= 0, with outward (radial) normal.

    x = a cos t, y = a sin t cos s, z = a sin t sin s on [0, 2pi) x [0, pi/2].
    """
    if not a > 0:
        raise ParameterError(f"hemisphere radius must be positive, got a={a!r}")
    a = float(a)

    def point(s, t):
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        st = np.sin(t)
        return np.stack([a * np.cos(t), a * st * np.cos(s), a * st * np.sin(s)], axis=-1)

    def partials(s, t):
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        st, ct, ss, cs = np.sin(t), np.cos(t), np.sin(s), np.cos(s)
        ps = np.stack([np.zeros_like(s), -a * st * ss, a * st * cs], axis=-1)
        pt = np.stack([-a * st, a * ct * cs, a * ct * ss], axis=-1)
        return ps, pt

    return ParamSurface(
        s_range=(0.0, 2.0 * math.pi),
        t_range=(0.0, 0.5 * math.pi),
        point=point,
        partials=partials,
        orientation=-1,
        edge_t=0.5 * math.pi,
        rim_radius=a,
        name=f"hemisphere(a={a:g})",
    )


def make_tabulated_surface(s_nodes, t_nodes, xyz, orientation=None, edge_t=None, name="table"):
    """Surface from samples ``xyz[i, j] = p(s_i, t_j)`` on a rectangular grid.

    The coordinates are interpolated with bicubic splines, whose analytic
    partials are used for normals and area elements.  ``orientation=None``
    picks the sign that makes the normal point out of the domain: with the
    outward normal, the surface integral of x n_x is the enclosed volume
    (the plane part, x = 0, adds nothing).
    """
    from scipy.interpolate import RectBivariateSpline

    s_nodes = np.asarray(s_nodes, float)
    t_nodes = np.asarray(t_nodes, float)
    xyz = np.asarray(xyz, float)
    if xyz.shape != (s_nodes.size, t_nodes.size, 3):
        raise ParameterError(
            f"table shape {xyz.shape} does not match ({s_nodes.size}, {t_nodes.size}, 3)"
        )
    k = 3 if min(s_nodes.size, t_nodes.size) >= 4 else 1
    splines = [RectBivariateSpline(s_nodes, t_nodes, xyz[..., c], kx=k, ky=k) for c in range(3)]

    def _ev(s, t, ds=0, dt=0):
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        cols = [sp.ev(s.ravel(), t.ravel(), dx=ds, dy=dt).reshape(s.shape) for sp in splines]
        return np.stack(cols, axis=-1)

    if edge_t is None:
        # the parameter edge whose x values are closest to zero
        lo, hi = np.abs(xyz[:, 0, 0]).max(), np.abs(xyz[:, -1, 0]).max()
        edge_t = float(t_nodes[0] if lo < hi else t_nodes[-1])
    rim = np.hypot(*_ev(s_nodes, np.full_like(s_nodes, edge_t))[:, 1:].T)
    if orientation is None:
        sg, ws = _gauss_legendre(16, s_nodes[0], s_nodes[-1])
        tg, wt = _gauss_legendre(16, t_nodes[0], t_nodes[-1])
        S, T = np.meshgrid(sg, tg, indexing="ij")
        nx = np.cross(_ev(S, T, ds=1), _ev(S, T, dt=1))[..., 0]
        volume = np.sum(np.outer(ws, wt) * _ev(S, T)[..., 0] * nx)
        orientation = 1 if volume > 0 else -1
    return ParamSurface(
        s_range=(float(s_nodes[0]), float(s_nodes[-1])),
        t_range=(float(t_nodes[0]), float(t_nodes[-1])),
        point=lambda s, t: _ev(s, t),
        partials=lambda s, t: (_ev(s, t, ds=1), _ev(s, t, dt=1)),
        orientation=orientation,
        edge_t=edge_t,
        rim_radius=float(rim.max()),
        name=name,
    )


@dataclass(frozen=True)
class PlanarRegion:
    """Region X in the plane x = 0.  Only disks centred at the origin are built in."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError(f"disk radius must be positive, got {self.radius!r}")

    def contains(self, y, z):
        return np.hypot(y, z) < self.radius


@dataclass(frozen=True)
class QuadratureGrid:
    """Quadrature nodes with weights that already include the area element.

    ``normals`` is None for planar grids.  ``params`` holds (s, t) for surface
    grids and (r, phi) for disk grids; ``shape`` is the tensor layout.
    """

    params: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    normals: Optional[np.ndarray] = None
    shape: tuple = ()
    surface: Optional[ParamSurface] = field(default=None, repr=False)
    radius: Optional[float] = None

    def __len__(self):
        return self.weights.size

    @property
    def size(self):
        return self.weights.size

    @property
    def area(self):
        return float(self.weights.sum())

    @property
    def mesh_width(self):
        """Local mesh width estimate sqrt(weight) at each node."""
        return np.sqrt(self.weights)

    def integrate(self, values):
        return float(np.dot(self.weights, np.asarray(values, float)))


def _gauss_legendre(n, lo, hi):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def build_surface_grid(surf: ParamSurface, Ns: int, Nt: int, s_rule: str = "gauss") -> QuadratureGrid:
    """Tensor Gauss-Legendre grid in (s, t) with area-element weights.

    ``s_rule="periodic"`` uses the midpoint trapezoid rule in s instead,
    which is more accurate when the surface is periodic in s (for the
    hemisphere it removes the node thinning around s = pi).
    """
    if int(Ns) != Ns or int(Nt) != Nt or Ns < 4 or Nt < 4:
        raise ParameterError(f"grid sizes must be integers >= 4, got Ns={Ns}, Nt={Nt}")
    if s_rule == "gauss":
        s, ws = _gauss_legendre(int(Ns), *surf.s_range)
    elif s_rule == "periodic":
        lo, hi = surf.s_range
        h = (hi - lo) / int(Ns)
        s, ws = lo + h * (np.arange(int(Ns)) + 0.5), np.full(int(Ns), h)
    else:
        raise ParameterError(f"s_rule must be 'gauss' or 'periodic', got {s_rule!r}")
    t, wt = _gauss_legendre(int(Nt), *surf.t_range)
    S, T = np.meshgrid(s, t, indexing="ij")
    pts = surf.point(S, T).reshape(-1, 3)
    ps, pt = surf.derivatives(S, T)
    cross = np.cross(ps, pt).reshape(-1, 3)
    jac = np.linalg.norm(cross, axis=1)
    if np.any(jac <= 1e-14 * max(jac.max(), 1.0)):
        raise DomainError("degenerate surface: area element vanishes at a grid node")
    normals = surf.orientation * cross / jac[:, None]
    weights = np.outer(ws, wt).ravel() * jac
    if np.any(pts[:, 0] <= 0):
        raise DomainError("surface grid has a node on or below the plane x = 0")
    return QuadratureGrid(
        params=np.column_stack([S.ravel(), T.ravel()]),
        points=pts,
        weights=weights,
        normals=normals,
        shape=(int(Ns), int(Nt)),
        surface=surf,
        radius=surf.rim_radius,
    )


def build_disk_grid(a: float, Nr: int, Nphi: int, r_break: Optional[float] = None) -> QuadratureGrid:
    """Polar Gauss-Legendre grid on the disk y^2 + z^2 < a^2 in the plane x = 0.

    With ``r_break`` the radial rule is split into two panels [0, r_break]
    and [r_break, a] with ``Nr`` nodes each, so data with a kink on that
    circle is still integrated accurately.
    """
    if not a > 0:
        raise ParameterError(f"disk radius must be positive, got a={a!r}")
    if int(Nr) != Nr or int(Nphi) != Nphi or Nr < 4 or Nphi < 4:
        raise ParameterError(f"grid sizes must be integers >= 4, got Nr={Nr}, Nphi={Nphi}")
    if r_break is not None:
        if not 0 < r_break < a:
            raise ParameterError(f"r_break must lie in (0, {a:g}), got {r_break!r}")
        r0, w0 = _gauss_legendre(int(Nr), 0.0, float(r_break))
        r1, w1 = _gauss_legendre(int(Nr), float(r_break), float(a))
        r, wr = np.concatenate([r0, r1]), np.concatenate([w0, w1])
    else:
        r, wr = _gauss_legendre(int(Nr), 0.0, float(a))
    ph, wp = _gauss_legendre(int(Nphi), 0.0, 2.0 * math.pi)
    R, P = np.meshgrid(r, ph, indexing="ij")
    pts = np.column_stack([np.zeros(R.size), (R * np.cos(P)).ravel(), (R * np.sin(P)).ravel()])
    weights = (np.outer(wr, wp) * R).ravel()
    return QuadratureGrid(
        params=np.column_stack([R.ravel(), P.ravel()]),
        points=pts,
        weights=weights,
        normals=None,
        shape=(r.size, int(Nphi)),
        radius=float(a),
    )


def check_orthogonality(grid: QuadratureGrid, tol: float = 0.05) -> float:
    """Largest |n_x| over the parameter row nearest the rim curve.

    The boundary should meet the plane x = 0 at a right angle, i.e. the
    normal there is parallel to the plane.  Returns the measured value; the
    caller decides whether ``> tol`` is worth a warning.
    """
    ns, nt = grid.shape
    surf = grid.surface
    t = grid.params[:, 1].reshape(ns, nt)
    nx = grid.normals[:, 0].reshape(ns, nt)
    edge = surf.edge_t if surf is not None and surf.edge_t is not None else t[0, -1]
    col = int(np.argmin(np.abs(t[0] - edge)))
    return float(np.abs(nx[:, col]).max())
