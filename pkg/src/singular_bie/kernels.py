"""Fundamental solutions q1, q2 and their conormal derivatives.

All functions broadcast over leading axes: points are arrays ``(..., 3)``
holding (x, y, z).  The distance to the source and to its mirror image in
the plane x = 0 are

    r^2  = (x - xi)^2 + (y - eta)^2 + (z - zeta)^2
    r1^2 = (x + xi)^2 + (y - eta)^2 + (z - zeta)^2 = r^2 + 4 x xi

and the hypergeometric factors are evaluated at ``1 - r^2/r1^2`` in [0, 1),
where every series involved is bounded.  The raw sigma-form
(``sigma = 1 - r1^2/r^2 <= 0``) is kept as an independent cross-check path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import ParameterError, SingularityError
from .specfun import hyp2f1

__all__ = [
    "KernelKind",
    "SingularityParams",
    "PairGeometry",
    "pair_geometry",
    "q1",
    "q2",
    "q1_sigma_form",
    "q2_sigma_form",
    "fundamental",
    "conormal_q1",
    "conormal_q2",
    "conormal_q1_raw",
    "conormal_q2_raw",
    "conormal",
    "conormal_of_field",
    "grad_q_field",
    "DIAGONAL_CUTOFF",
]

TWO_PI = 2.0 * math.pi
DIAGONAL_CUTOFF = 1e-12


class KernelKind(str, Enum):
    Q1 = "Q1"
    Q2 = "Q2"

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ParameterError(f"unknown kernel kind {value!r}; use Q1 or Q2") from None


@dataclass(frozen=True)
class SingularityParams:
    """The coefficient alpha of E(u) = u_xx + u_yy + u_zz + (2 alpha / x) u_x."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 < 2.0 * a < 1.0):
            raise ParameterError(f"alpha must satisfy 0 < 2*alpha < 1, got 2*alpha={2 * a:g}")
        object.__setattr__(self, "alpha", a)

    @classmethod
    def coerce(cls, value):
        return value if isinstance(value, cls) else cls(float(value))


@dataclass(frozen=True)
class PairGeometry:
    r: np.ndarray
    r1: np.ndarray
    sigma: np.ndarray
    co_sigma: np.ndarray


def pair_geometry(field, source) -> PairGeometry:
    p = np.asarray(field, float)
    q = np.asarray(source, float)
    d = p - q
    r2 = np.einsum("...i,...i->...", d, d)
    r12 = r2 + 4.0 * p[..., 0] * q[..., 0]
    return PairGeometry(
        r=np.sqrt(r2),
        r1=np.sqrt(r12),
        sigma=1.0 - r12 / r2,
        co_sigma=4.0 * p[..., 0] * q[..., 0] / r12,
    )


def _distances(p, q):
    d = p - q
    r2 = np.einsum("...i,...i->...", d, d)
    r12 = r2 + 4.0 * p[..., 0] * q[..., 0]
    if np.any(r2 <= (DIAGONAL_CUTOFF**2) * r12):
        raise SingularityError("kernel evaluated at coincident points (r = 0)")
    return d, r2, r12


def q1(field, source, sp) -> np.ndarray:
    """(1/2pi) r^{-1-2a} F(a+1/2, a; 2a; sigma), via the regularized form."""
    a = SingularityParams.coerce(sp).alpha
    p, q = np.asarray(field, float), np.asarray(source, float)
    _, r2, r12 = _distances(p, q)
    co = 4.0 * p[..., 0] * q[..., 0] / r12
    val = hyp2f1(a - 0.5, a, 2 * a, co) / (TWO_PI * np.sqrt(r2) * r12**a)
    return _scalar(val)


def q2(field, source, sp) -> np.ndarray:
    """(1/2pi) r^{2a-3} (x xi)^{1-2a} F(3/2-a, 1-a; 2-2a; sigma); zero on x = 0."""
    a = SingularityParams.coerce(sp).alpha
    p, q = np.asarray(field, float), np.asarray(source, float)
    _, r2, r12 = _distances(p, q)
    xx = p[..., 0] * q[..., 0]
    co = 4.0 * xx / r12
    val = xx ** (1 - 2 * a) * hyp2f1(0.5 - a, 1 - a, 2 - 2 * a, co)
    val = val / (TWO_PI * np.sqrt(r2) * r12 ** (1 - a))
    return _scalar(val)


def q1_sigma_form(field, source, sp):
    """q1 evaluated literally at sigma = 1 - r1^2/r^2 <= 0 (cross-check path)."""
    a = SingularityParams.coerce(sp).alpha
    p, q = np.asarray(field, float), np.asarray(source, float)
    _, r2, r12 = _distances(p, q)
    sigma = 1.0 - r12 / r2
    return _scalar(r2 ** (-a - 0.5) * hyp2f1(a + 0.5, a, 2 * a, sigma) / TWO_PI)


def q2_sigma_form(field, source, sp):
    a = SingularityParams.coerce(sp).alpha
    p, q = np.asarray(field, float), np.asarray(source, float)
    _, r2, r12 = _distances(p, q)
    sigma = 1.0 - r12 / r2
    xx = p[..., 0] * q[..., 0]
    val = r2 ** (a - 1.5) * xx ** (1 - 2 * a) * hyp2f1(1.5 - a, 1 - a, 2 - 2 * a, sigma)
    return _scalar(val / TWO_PI)


def fundamental(kind, field, source, sp):
    kind = KernelKind.coerce(kind)
    return q1(field, source, sp) if kind is KernelKind.Q1 else q2(field, source, sp)


def _scalar(val):
    val = np.asarray(val)
    return float(val) if val.ndim == 0 else val


def _conormal_log(d, r2, surface_pt, normal, a):
    # B_nu[ln r^2] at the surface point: xi^{2a} * nu . grad_xi ln r^2
    # grad_xi r^2 = -2 (field - surface)
    return -2.0 * surface_pt[..., 0] ** (2 * a) * np.einsum("...i,...i->...", normal, d) / r2


def conormal_q1(surface_pt, normal, field, sp):
    """Conormal derivative of q1 with respect to the surface point.

    B_nu = xi^{2a} (nu . grad_xi).  Regularized two-term form

        -(1+2a)/(4 pi) r1^{-2a} r^{-1} F(a-3/2, a; 2a; c) B_nu[ln r^2]
        -(1+2a)/(2 pi) x xi^{2a} r^{-1} r1^{-2a-2} F(a-1/2, 1+a; 1+2a; c) nu_x

    with c = 1 - r^2/r1^2.
    """
    a = SingularityParams.coerce(sp).alpha
    s = np.asarray(surface_pt, float)
    n = np.asarray(normal, float)
    p = np.asarray(field, float)
    d, r2, r12 = _distances(p, s)
    co = 4.0 * p[..., 0] * s[..., 0] / r12
    r = np.sqrt(r2)
    blog = _conormal_log(d, r2, s, n, a)
    t1 = -(1 + 2 * a) / (2 * TWO_PI) * hyp2f1(a - 1.5, a, 2 * a, co) * blog / (r * r12**a)
    t2 = (
        -(1 + 2 * a)
        / TWO_PI
        * p[..., 0]
        * s[..., 0] ** (2 * a)
        * n[..., 0]
        * hyp2f1(a - 0.5, 1 + a, 1 + 2 * a, co)
        / (r * r12 ** (1 + a))
    )
    return _scalar(t1 + t2)


def conormal_q2(surface_pt, normal, field, sp):
    """Conormal derivative of q2 with respect to the surface point.

    With A = 3/2 - a, b = 1 - a, c = 1 - r^2/r1^2:

        (1/2pi) x^{1-2a} r^{-1} r1^{2a-2} * [
            (1-2a) F(1/2-a, b; 2-2a; c) nu_x
          - A xi^{1-2a} F(-1/2-a, b; 2-2a; c) B_nu[ln r^2]
          - 2A x xi / r1^2 F(1/2-a, 2-a; 3-2a; c) nu_x ]
    """
    a = SingularityParams.coerce(sp).alpha
    s = np.asarray(surface_pt, float)
    n = np.asarray(normal, float)
    p = np.asarray(field, float)
    d, r2, r12 = _distances(p, s)
    x, xi = p[..., 0], s[..., 0]
    co = 4.0 * x * xi / r12
    A = 1.5 - a
    blog = _conormal_log(d, r2, s, n, a)
    bracket = (
        (1 - 2 * a) * hyp2f1(0.5 - a, 1 - a, 2 - 2 * a, co) * n[..., 0]
        - A * xi ** (1 - 2 * a) * hyp2f1(-0.5 - a, 1 - a, 2 - 2 * a, co) * blog
        - 2 * A * x * xi / r12 * hyp2f1(0.5 - a, 2 - a, 3 - 2 * a, co) * n[..., 0]
    )
    val = x ** (1 - 2 * a) * bracket / (TWO_PI * np.sqrt(r2) * r12 ** (1 - a))
    return _scalar(val)


def _grad_source_sigma_form(kind, surface_pt, field, a):
    """Gradient of q with respect to the source point from the raw partials.

    For both fundamental solutions write q = C(x, xi) r^{-2A} F(A, B; 2B; sigma).
    Then (with sigma <= 0, no Euler transformation):

        d/d xi  [r^{-2A} F] = 2A (x - xi) r^{-2A-2} F(A+1, B; 2B; sigma)
                              - 2A x r^{-2A-2} F(A+1, B+1; 2B+1; sigma)
        d/d eta [r^{-2A} F] = 2A (y - eta) r^{-2A-2} F(A+1, B; 2B; sigma)
    """
    s = np.asarray(surface_pt, float)
    p = np.asarray(field, float)
    d, r2, r12 = _distances(p, s)
    sigma = 1.0 - r12 / r2
    x, xi = p[..., 0], s[..., 0]
    if kind is KernelKind.Q1:
        A, B = a + 0.5, a
    else:
        A, B = 1.5 - a, 1 - a
    f0 = np.asarray(hyp2f1(A, B, 2 * B, sigma))
    f1 = np.asarray(hyp2f1(A + 1, B, 2 * B, sigma))
    f2 = np.asarray(hyp2f1(A + 1, B + 1, 2 * B + 1, sigma))
    base = 2 * A * r2 ** (-A - 1)
    grad = base[..., None] * f1[..., None] * d
    grad[..., 0] -= base * x * f2
    if kind is KernelKind.Q1:
        return grad / TWO_PI
    # q2 carries the factor (x xi)^{1-2a}
    pref = (x * xi) ** (1 - 2 * a)
    grad = grad * pref[..., None]
    grad[..., 0] += (1 - 2 * a) * x ** (1 - 2 * a) * xi ** (-2 * a) * r2 ** (-A) * f0
    return grad / TWO_PI


def conormal_q1_raw(surface_pt, normal, field, sp):
    """B_nu[q1] assembled from the sigma-form partial derivatives."""
    a = SingularityParams.coerce(sp).alpha
    s, n = np.asarray(surface_pt, float), np.asarray(normal, float)
    g = _grad_source_sigma_form(KernelKind.Q1, s, field, a)
    return _scalar(s[..., 0] ** (2 * a) * np.einsum("...i,...i->...", n, g))


def conormal_q2_raw(surface_pt, normal, field, sp):
    a = SingularityParams.coerce(sp).alpha
    s, n = np.asarray(surface_pt, float), np.asarray(normal, float)
    g = _grad_source_sigma_form(KernelKind.Q2, s, field, a)
    return _scalar(s[..., 0] ** (2 * a) * np.einsum("...i,...i->...", n, g))


def conormal(kind, surface_pt, normal, field, sp):
    kind = KernelKind.coerce(kind)
    fn = conormal_q1 if kind is KernelKind.Q1 else conormal_q2
    return fn(surface_pt, normal, field, sp)


def conormal_of_field(kind, surface_pt_as_field, normal, source, sp):
    """B_n of q(field, source) taken at the field point.

    q1 and q2 are symmetric in their two points, so this is the source-side
    conormal with the roles exchanged.
    """
    return conormal(kind, surface_pt_as_field, normal, source, sp)


def grad_q_field(kind, field, source, sp):
    """Gradient of q(field, source) with respect to the field point."""
    kind = KernelKind.coerce(kind)
    a = SingularityParams.coerce(sp).alpha
    return _grad_source_sigma_form(kind, field, source, a)
