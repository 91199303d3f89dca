"""Self-check suites run by ``singular-bie verify``.

Each suite returns a list of ``Check`` records; a check passes when
|measured - expected| <= tol (or, for upper bounds, measured <= tol).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np
from scipy import integrate

from .bie import assemble, solve_density
from .exceptions import EigenvalueCaseError
from .geometry import build_surface_grid, make_hemisphere
from .kernels import KernelKind
from .potentials import (
    DensityVector,
    double_layer_limit,
    gauss_flux,
    plane_flux_i_exact,
    single_layer_conormal_limit,
)
from .specfun import gamma_fn, hyp2f1

__all__ = ["Check", "SUITES", "run_suite", "plane_identity_integral", "sample_points"]

ALPHAS = (0.1, 0.25, 0.4)


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    expected: float
    tol: float
    bound: bool = False  # measured is a quantity that must stay below tol

    @property
    def passed(self):
        if not np.isfinite(self.measured):
            return False
        if self.bound:
            return self.measured <= self.tol
        return abs(self.measured - self.expected) <= self.tol

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name}  measured={self.measured:.12g}  expected={self.expected:.12g}  tol={self.tol:.1e}  {status}"


def sample_points(rng, n, r_lo, r_hi, x_min=0.0):
    """Random points in the half-space with |p| in [r_lo, r_hi] and x >= x_min."""
    d = rng.normal(size=(n, 3))
    d[:, 0] = np.abs(d[:, 0])
    d /= np.linalg.norm(d, axis=1)[:, None]
    p = d * rng.uniform(r_lo, r_hi, size=(n, 1))
    p[:, 0] = np.maximum(p[:, 0], x_min)
    return p


# --------------------------------------------------------------------------

def suite_specfun(seed=0) -> List[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(50):
        a = rng.uniform(-2.0, 2.0)
        b = rng.uniform(-2.0, 2.0)
        c = a + b + rng.uniform(0.2, 3.0)
        if c <= 0 and float(c).is_integer():
            c += 0.5
        exact = math.gamma(c) * math.gamma(c - a - b) / (math.gamma(c - a) * math.gamma(c - b))
        worst = max(worst, abs(hyp2f1(a, b, c, 1.0) - exact) / max(1.0, abs(exact)))
    checks = [Check("gauss-summation (50 sets, rel)", worst, 0.0, 1e-10, bound=True)]

    worst = 0.0
    for _ in range(50):
        a, b = rng.uniform(-1.5, 1.5, size=2)
        c = rng.uniform(0.3, 3.0)
        z = rng.uniform(-5.0, 0.9)
        lhs = hyp2f1(a, b, c, z)
        rhs = (1 - z) ** (c - a - b) * hyp2f1(c - a, c - b, c, z)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    checks.append(Check("euler-transformation z in (-5, 0.9)", worst, 0.0, 1e-9, bound=True))

    ts = np.concatenate([rng.uniform(0.05, 20.0, 30), -rng.uniform(0.05, 5.0, 10) - 0.5])
    err = max(abs(gamma_fn(t) / math.gamma(t) - 1.0) for t in ts)
    checks.append(Check("gamma vs math.gamma (rel)", err, 0.0, 1e-12, bound=True))
    return checks


def plane_identity_integral(alpha, T=20.0):
    """Integral of (1 + t^2 + s^2)^(-alpha-3/2) over the plane.

    The square [-T, T]^2 is integrated adaptively; the rest of the plane is
    done in polar coordinates, where the radial integral has the primitive
    (1 + r^2)^(1-q) / (2 (1-q)), q = alpha + 3/2, leaving a 1-D angular
    integral over the eight symmetric wedges.
    """
    q = alpha + 1.5
    f = lambda s, t: (1.0 + t * t + s * s) ** (-q)
    # one octant-symmetric quarter of the square, times 4
    sq, _ = integrate.dblquad(f, 0.0, T, 0.0, T, epsabs=1e-13, epsrel=1e-12)
    tail_wedge, _ = integrate.quad(
        lambda th: (1.0 + (T / math.cos(th)) ** 2) ** (1.0 - q) / (2.0 * (q - 1.0)),
        0.0,
        math.pi / 4,
        epsabs=1e-14,
        epsrel=1e-12,
    )
    return 4.0 * sq + 8.0 * tail_wedge


def suite_plane_identity() -> List[Check]:
    return [
        Check(f"plane-identity alpha={a}", plane_identity_integral(a), 2 * math.pi / (1 + 2 * a), 1e-6)
        for a in ALPHAS
    ]


def suite_gauss_flux(n=32, seed=1) -> List[Check]:
    rng = np.random.default_rng(seed)
    grid = build_surface_grid(make_hemisphere(1.0), n, n)
    inside = sample_points(rng, 10, 0.1, 0.7, x_min=0.05)
    outside = sample_points(rng, 10, 1.4, 3.0)
    plane = np.column_stack([np.zeros(5), rng.uniform(-0.5, 0.5, (5, 2))])
    nodes = rng.choice(np.flatnonzero((grid.params[:, 1] > 0.2) & (grid.params[:, 1] < 1.3)), 5, replace=False)
    checks = []
    for a in ALPHAS:
        wi = gauss_flux(KernelKind.Q1, grid, inside, a)
        wo = gauss_flux(KernelKind.Q1, grid, outside, a)
        wp = gauss_flux(KernelKind.Q1, grid, plane, a)
        one = np.ones(grid.size)
        lim_i = double_layer_limit(KernelKind.Q1, one, nodes, a, "inside", grid=grid)
        lim_o = double_layer_limit(KernelKind.Q1, one, nodes, a, "outside", grid=grid)
        surf = 0.5 * (lim_i + lim_o)
        checks += [
            Check(f"Q1 interior alpha={a} (max dev)", np.abs(wi + 1).max(), 0.0, 1e-3, bound=True),
            Check(f"Q1 exterior alpha={a} (max dev)", np.abs(wo).max(), 0.0, 1e-3, bound=True),
            Check(f"Q1 plane X alpha={a} (max dev)", np.abs(wp + 1).max(), 0.0, 5e-3, bound=True),
            Check(f"Q1 surface alpha={a} (max dev from -1/2)", np.abs(surf + 0.5).max(), 0.0, 5e-3, bound=True),
        ]
        w2 = gauss_flux(KernelKind.Q2, grid, inside, a)
        i_val = plane_flux_i_exact(inside, 1.0, a)
        checks.append(Check(f"Q2 interior i-1 alpha={a} (max dev)", np.abs(w2 - (i_val - 1)).max(), 0.0, 1e-3, bound=True))
    return checks


def suite_jumps(n=32, alpha=0.25, seed=2) -> List[Check]:
    rng = np.random.default_rng(seed)
    grid = build_surface_grid(make_hemisphere(1.0), n, n)
    nodes = rng.choice(np.flatnonzero((grid.params[:, 1] > 0.2) & (grid.params[:, 1] < 1.3)), 10, replace=False)
    mu = DensityVector.from_function(grid, lambda p: 1.0 + p[:, 1] * p[:, 2] + np.cos(p[:, 0]))
    checks = []
    for kind in (KernelKind.Q1, KernelKind.Q2):
        jump = double_layer_limit(kind, mu, nodes, alpha, "outside") - double_layer_limit(kind, mu, nodes, alpha, "inside")
        checks.append(Check(f"double-layer jump {kind.value} (max |jump - mu|)", np.abs(jump - mu.values[nodes]).max(), 0.0, 1e-2, bound=True))
        jump = single_layer_conormal_limit(kind, mu, nodes, alpha, "inside") - single_layer_conormal_limit(kind, mu, nodes, alpha, "outside")
        checks.append(Check(f"single-layer conormal jump {kind.value} (max |jump - rho|)", np.abs(jump - mu.values[nodes]).max(), 0.0, 1e-2, bound=True))
    return checks


def suite_eigen(n=24, alpha=0.25) -> List[Check]:
    grid = build_surface_grid(make_hemisphere(1.0), n, n)
    sys_q1m = assemble(KernelKind.Q1, grid, alpha, -2.0)
    checks = [Check("Q1 lambda=-2 null residual ||A 1||_inf", np.abs(sys_q1m.apply(np.ones(grid.size))).max(), 0.0, 5e-3, bound=True)]
    try:
        solve_density(sys_q1m, np.ones(grid.size))
        rejected = 0.0
    except EigenvalueCaseError:
        rejected = 1.0
    checks.append(Check("Q1 lambda=-2 solve rejected", rejected, 1.0, 0.0))
    for kind, lam in ((KernelKind.Q1, 2.0), (KernelKind.Q2, 2.0), (KernelKind.Q2, -2.0)):
        cond = assemble(kind, grid, alpha, lam).condition_estimate()
        checks.append(Check(f"{kind.value} lambda={lam:g} condition estimate", cond, 0.0, 1e6, bound=True))
    return checks


SUITES: Dict[str, Callable[[], List[Check]]] = {
    "specfun": suite_specfun,
    "gauss-flux": suite_gauss_flux,
    "jumps": suite_jumps,
    "eigen": suite_eigen,
    "plane-identity": suite_plane_identity,
}


def run_suite(name) -> List[Check]:
    return SUITES[name]()
