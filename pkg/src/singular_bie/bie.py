"""Nystrom discretization of the second-kind density equations on the surface.

The equation  mu - lam * K mu = f  is collocated at the quadrature nodes.
The kernel is singular at coincident points, so the diagonal is closed with
the exact flux of the unit density through the surface:

    A_ii = 1 - lam * (C_i - sum_{j != i} w_j K_ij)

with C = -1/2 for Q1 and C = i(node_i) - 1/2 for Q2.  Applied to a constant
density this row reproduces the exact on-surface value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import _parallel
from .exceptions import EigenvalueCaseError, ParameterError, SingularityError, SingularSystemError
from .geometry import QuadratureGrid
from .kernels import DIAGONAL_CUTOFF, KernelKind, SingularityParams, conormal
from .potentials import DensityVector, plane_flux_i_exact

__all__ = ["NystromSystem", "assemble", "kernel_matrix", "surface_flux_constant", "solve_density"]

# largest acceptable reciprocal condition estimate before refusing to solve
RCOND_MIN = 1e-13
RESIDUAL_RTOL = 1e-10


def kernel_matrix(kind, grid: QuadratureGrid, sp):
    """W[i, j] = w_j K(node_j -> node_i) for i != j, zero on the diagonal."""
    kind = KernelKind.coerce(kind)
    sp = SingularityParams.coerce(sp)
    pts, nrm = grid.points, grid.normals
    n = grid.size
    scale = float(np.ptp(pts, axis=0).max()) or 1.0
    far = pts + np.array([10.0 * scale, 0.0, 0.0])

    def block(i0, i1):
        rows = np.arange(i0, i1)
        src = np.broadcast_to(pts[None, :, :], (i1 - i0, n, 3)).copy()
        # the diagonal pair is replaced by a distant dummy and zeroed below
        src[rows - i0, rows] = far[rows]
        d = np.linalg.norm(src - pts[i0:i1, None, :], axis=-1)
        if np.any(d < DIAGONAL_CUTOFF * scale):
            raise SingularityError("two surface grid nodes coincide")
        k = np.asarray(conormal(kind, src, nrm[None, :, :], pts[i0:i1, None, :], sp))
        k = k * grid.weights[None, :]
        k[rows - i0, rows] = 0.0
        return k

    return _parallel.fill_rows(_parallel.empty(n, n), block)


def surface_flux_constant(kind, grid, sp):
    """Exact on-surface value of the unit-density double layer at each node."""
    kind = KernelKind.coerce(kind)
    if kind is KernelKind.Q1:
        return np.full(grid.size, -0.5)
    radius = grid.radius
    if radius is None:
        raise ParameterError("Q2 diagonal closure needs the rim radius of the planar region")
    return plane_flux_i_exact(grid.points, radius, sp) - 0.5


@dataclass
class NystromSystem:
    """Dense matrix of  mu -> mu - lam * K mu  with its LU factors (lazy)."""

    matrix: np.ndarray
    lam: float
    kind: KernelKind
    grid: QuadratureGrid
    sp: SingularityParams
    _lu: tuple = field(default=None, repr=False)
    _rcond: float = field(default=None, repr=False)

    @property
    def size(self):
        return self.matrix.shape[0]

    @property
    def is_eigenvalue_case(self):
        return self.kind is KernelKind.Q1 and self.lam == -2.0

    def apply(self, mu):
        return self.matrix @ np.asarray(getattr(mu, "values", mu), float)

    def factorize(self):
        if self._lu is None:
            lu, piv = linalg.lu_factor(self.matrix, check_finite=False)
            self._lu = (lu, piv)
            anorm = np.abs(self.matrix).sum(axis=0).max()
            gecon = linalg.get_lapack_funcs("gecon", (lu,))
            rc, info = gecon(lu, anorm, norm="1")
            self._rcond = float(rc) if info == 0 else 0.0
        return self._lu

    def condition_estimate(self):
        """1-norm condition number estimate from the LU factors."""
        self.factorize()
        return np.inf if self._rcond == 0.0 else 1.0 / self._rcond


def assemble(kind, grid: QuadratureGrid, sp, lam: float) -> NystromSystem:
    """Nystrom matrix for  mu - lam * K mu  with flux-based diagonal closure."""
    kind = KernelKind.coerce(kind)
    sp = SingularityParams.coerce(sp)
    lam = float(lam)
    if grid.normals is None:
        raise ParameterError("assemble needs a surface grid with normals")
    W = kernel_matrix(kind, grid, sp)
    diag = surface_flux_constant(kind, grid, sp) - W.sum(axis=1)
    A = -lam * W
    A[np.diag_indices_from(A)] = 1.0 - lam * diag
    return NystromSystem(A, lam, kind, grid, sp)


def solve_density(system: NystromSystem, rhs) -> DensityVector:
    """Solve  A mu = rhs  by LU; reject the Q1 lam = -2 case and near-singular systems."""
    if system.is_eigenvalue_case:
        raise EigenvalueCaseError(
            "lambda = -2 is an eigenvalue of the Q1 kernel (constants are eigenfunctions)",
            condition=np.inf,
        )
    b = np.asarray(getattr(rhs, "values", rhs), float).ravel()
    if b.size != system.size:
        raise ParameterError(f"rhs has {b.size} values, system has {system.size} unknowns")
    lu = system.factorize()
    cond = system.condition_estimate()
    if not np.isfinite(cond) or 1.0 / cond < RCOND_MIN:
        raise SingularSystemError(f"density system is singular (cond ~ {cond:.3g})", condition=cond)
    mu = linalg.lu_solve(lu, b, check_finite=False)
    bnorm = np.abs(b).max()
    res = np.abs(system.matrix @ mu - b).max()
    if res > RESIDUAL_RTOL * max(bnorm, np.finfo(float).tiny):
        # one step of iterative refinement before giving up
        mu += linalg.lu_solve(lu, b - system.matrix @ mu, check_finite=False)
        res = np.abs(system.matrix @ mu - b).max()
        if res > RESIDUAL_RTOL * max(bnorm, np.finfo(float).tiny):
            raise SingularSystemError(
                f"residual {res:.3g} exceeds tolerance (cond ~ {cond:.3g})", condition=cond
            )
    return DensityVector(mu, system.grid)
