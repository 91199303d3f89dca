import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import interior_points
from singular_bie import (
    BvpProblem,
    CompatibilityError,
    DomainError,
    ParameterError,
    SurfaceData,
    energy_diagnostic,
    evaluate_solution,
    make_hemisphere,
    q1,
    q2,
    solve,
    solve_dirichlet,
    solve_holmgren,
)
from singular_bie.bvp import _plane_trace_and_flux, star_volume_rule
from singular_bie.potentials import double_layer_limit

ALPHA = 0.25
SRC = np.array([2.5, 0.4, -0.3])
N = 24


def _problem(kind, phi, plane=0.0, alpha=ALPHA, n=N):
    return BvpProblem(alpha, make_hemisphere(1.0), kind, phi, plane, n_s=n, n_t=n)


def _rel_err(u, exact):
    return np.abs(u - exact).max() / np.abs(exact).max()


@pytest.fixture(scope="module")
def pts():
    return interior_points(np.random.default_rng(7), 20)


def test_problem_validation():
    with pytest.raises(ParameterError):
        _problem("neumann", 0.0)
    with pytest.raises(ParameterError):
        solve_holmgren(_problem("dirichlet", 0.0))
    with pytest.raises(ParameterError):
        solve_dirichlet(_problem("holmgren", 0.0))


def test_compatibility_checked():
    with pytest.raises(CompatibilityError):
        solve(_problem("dirichlet", 1.0, 0.0))


def test_dirichlet_q2_manufactured(pts):
    u_star = lambda p: q2(p, SRC, ALPHA)
    sol = solve(_problem("dirichlet", u_star))
    assert _rel_err(sol(pts), u_star(pts)) <= 1e-3


def test_holmgren_q1_manufactured(pts):
    u_star = lambda p: q1(p, SRC, ALPHA)
    sol = solve(_problem("holmgren", u_star))
    assert _rel_err(sol(pts), u_star(pts)) <= 1e-3


@pytest.mark.parametrize("kind", ["dirichlet", "holmgren"])
def test_x_power_manufactured(kind, pts):
    e = 1 - 2 * ALPHA
    plane = 0.0 if kind == "dirichlet" else e
    sol = solve(_problem(kind, lambda p: p[:, 0] ** e, plane))
    assert _rel_err(sol(pts), pts[:, 0] ** e) <= 1e-3


def test_dirichlet_with_plane_data(pts):
    # u* = y: harmonic, independent of x, trace tau1 = y
    sol = solve(_problem("dirichlet", lambda p: p[:, 1], lambda y, z: y))
    assert_allclose(sol(pts), pts[:, 1], atol=1e-3)
    tau, _ = _plane_trace_and_flux(sol, np.array([[0.2, 0.1], [-0.3, 0.4]]))
    assert_allclose(tau, [0.2, -0.3], atol=1e-2)


def test_holmgren_plane_condition_reproduced():
    e = 1 - 2 * ALPHA
    sol = solve(_problem("holmgren", lambda p: p[:, 0] ** e, e))
    _, nu = _plane_trace_and_flux(sol, np.array([[0.2, 0.1], [-0.3, 0.4], [0.0, 0.0]]))
    assert_allclose(nu, e, atol=1e-2)


@pytest.mark.parametrize("kind", ["dirichlet", "holmgren"])
def test_uniqueness(kind, pts):
    sol = solve(_problem(kind, 0.0))
    assert np.abs(sol(pts)).max() <= 1e-6


def test_linearity(pts):
    u_star = lambda p: q1(p, SRC, ALPHA)
    a = solve(_problem("holmgren", u_star))(pts)
    b = solve(_problem("holmgren", lambda p: -3.0 * u_star(p)))(pts)
    assert_allclose(b, -3.0 * a, rtol=1e-10)


def test_symmetric_data_gives_symmetric_solution():
    # data even in z
    sol = solve(_problem("holmgren", lambda p: q1(p, np.array([2.0, 0.3, 0.0]), ALPHA)))
    p = np.array([[0.3, 0.2, 0.25]])
    pm = p * np.array([1, 1, -1])
    assert_allclose(sol(p), sol(pm), atol=1e-6)


def test_boundary_values_reproduced():
    u_star = lambda p: q2(p, SRC, ALPHA)
    sol = solve(_problem("dirichlet", u_star))
    rng = np.random.default_rng(3)
    t = sol.grid.params[:, 1]
    nodes = rng.choice(np.flatnonzero((t > 0.2) & (t < 1.3)), 20, replace=False)
    inner = sol.reduction(sol.grid.points[nodes]) + double_layer_limit(sol.kind, sol.mu, nodes, ALPHA, "inside")
    assert_allclose(inner, u_star(sol.grid.points[nodes]), atol=5e-3)


def test_evaluation_outside_domain_rejected():
    sol = solve(_problem("holmgren", 0.0))
    with pytest.raises(DomainError):
        evaluate_solution(sol, [0.5, 1.2, 0.0])
    with pytest.raises(DomainError):
        evaluate_solution(sol, [-0.1, 0.0, 0.0])


def test_surface_data_table_is_bilinear():
    s, t = np.linspace(0, 1, 3), np.linspace(0, 2, 5)
    vals = np.add.outer(2 * s, t)
    data = SurfaceData.from_table(s, t, vals)
    prm = np.array([[0.25, 0.5], [0.9, 1.7]])
    assert_allclose(data(None, prm), 2 * prm[:, 0] + prm[:, 1], rtol=1e-14)
    with pytest.raises(ParameterError):
        data(np.zeros((2, 3)))


def test_star_volume_rule_integrates_half_ball():
    P, W = star_volume_rule(make_hemisphere(1.0), 10, ALPHA)
    assert_allclose(W.sum(), 2 * np.pi / 3, rtol=1e-7)
    # integral of x^(2a) over the half-ball: 2 pi / ((2a+1)(2a+3))
    assert_allclose(np.sum(W * P[:, 0] ** (2 * ALPHA)), 2 * np.pi / ((2 * ALPHA + 1) * (2 * ALPHA + 3)), rtol=1e-6)


def test_energy_diagnostic():
    sol = solve(_problem("dirichlet", lambda p: q2(p, SRC, ALPHA)))
    assert energy_diagnostic(sol, volume_sampling=10) <= 0.10
    zero = solve(_problem("dirichlet", 0.0))
    assert energy_diagnostic(zero, volume_sampling=6) == 0.0


def test_near_gamma_warning_not_raised_for_regular_grid():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        solve(_problem("holmgren", 0.0, n=16))
