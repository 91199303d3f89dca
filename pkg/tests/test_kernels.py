import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import q1_oracle, q2_oracle, random_half_space
from singular_bie import KernelKind, ParameterError, SingularityError, SingularityParams, q1, q2
from singular_bie.kernels import (
    conormal,
    conormal_of_field,
    conormal_q1,
    conormal_q1_raw,
    conormal_q2,
    conormal_q2_raw,
    grad_q_field,
    pair_geometry,
    q1_sigma_form,
    q2_sigma_form,
)


def _fd_grad(f, p, h=1e-5):
    g = np.zeros(3)
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        g[k] = (f(p + e) - f(p - e)) / (2 * h)
    return g


@pytest.mark.parametrize("alpha", [0.0, 0.5, -0.1, 0.6])
def test_singularity_params_bounds(alpha):
    with pytest.raises(ParameterError):
        SingularityParams(alpha)


def test_kernel_kind_coerce():
    assert KernelKind.coerce("q1") is KernelKind.Q1
    with pytest.raises(ParameterError):
        KernelKind.coerce("Q3")


def test_pair_geometry_invariants(rng):
    p, q = random_half_space(rng, 50), random_half_space(rng, 50)
    g = pair_geometry(p, q)
    assert np.all(g.r1 >= g.r)
    assert_allclose(g.r1**2 - g.r**2, 4 * p[:, 0] * q[:, 0], rtol=1e-12)
    assert_allclose((1 - g.sigma) * (1 - g.co_sigma), 1.0, rtol=1e-12)
    assert np.all((g.co_sigma >= 0) & (g.co_sigma < 1))


def test_q1_source_on_plane():
    # xi = 0 gives sigma = 0 and F = 1
    assert_allclose(q1([1, 0, 0], [0, 0, 1], 0.25), 2 ** -0.75 / (2 * math.pi), rtol=1e-14)


def test_q1_q2_against_mpmath(rng):
    for alpha in (0.1, 0.25, 0.4):
        p, q = random_half_space(rng, 20, lo=0.01), random_half_space(rng, 20, lo=0.01)
        want1 = [q1_oracle(a, b, alpha) for a, b in zip(p, q)]
        want2 = [q2_oracle(a, b, alpha) for a, b in zip(p, q)]
        assert_allclose(q1(p, q, alpha), want1, rtol=1e-11)
        assert_allclose(q2(p, q, alpha), want2, rtol=1e-11)
    assert_allclose(q1([1, 0, 0], [2, 1, 0], 0.3), q1_oracle([1, 0, 0], [2, 1, 0], 0.3), rtol=1e-12)
    assert_allclose(q2([1, 0, 0], [1, 1, 1], 0.2), q2_oracle([1, 0, 0], [1, 1, 1], 0.2), rtol=1e-12)


def test_regularized_matches_sigma_form(rng):
    p, q = random_half_space(rng, 100), random_half_space(rng, 100)
    assert_allclose(q1(p, q, 0.3), q1_sigma_form(p, q, 0.3), rtol=1e-11)
    assert_allclose(q2(p, q, 0.3), q2_sigma_form(p, q, 0.3), rtol=1e-11)


def test_symmetry_and_plane_zero(rng):
    p, q = random_half_space(rng, 30), random_half_space(rng, 30)
    assert_allclose(q1(p, q, 0.25), q1(q, p, 0.25), rtol=1e-14)
    assert_allclose(q2(p, q, 0.25), q2(q, p, 0.25), rtol=1e-14)
    assert q2([0, 0.3, 0.2], [0.5, 0.1, 0.7], 0.25) == 0.0


def test_coincident_points_raise():
    with pytest.raises(SingularityError):
        q1([0.5, 0, 0], [0.5, 0, 0], 0.25)


@pytest.mark.parametrize("kind", ["Q1", "Q2"])
def test_pde_residual(kind, rng):
    # E(u) = u_xx + u_yy + u_zz + (2a/x) u_x by central differences
    alpha, h = 0.3, 1e-3
    f = q1 if kind == "Q1" else q2
    for _ in range(50):
        while True:
            p, q = random_half_space(rng, 2, lo=0.3)
            if np.linalg.norm(p - q) > 0.2:
                break
        u0 = f(p, q, alpha)
        terms = []
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            terms.append((f(p + e, q, alpha) - 2 * u0 + f(p - e, q, alpha)) / h**2)
        e = np.array([h, 0, 0])
        terms.append(2 * alpha / p[0] * (f(p + e, q, alpha) - f(p - e, q, alpha)) / (2 * h))
        assert abs(sum(terms)) <= 1e-4 * sum(abs(t) for t in terms)


@pytest.mark.parametrize("kind", ["Q1", "Q2"])
def test_conormal_matches_finite_differences(kind, rng):
    alpha = 0.25
    f = q1 if kind == "Q1" else q2
    for _ in range(10):
        xi = random_half_space(rng, 1, lo=0.3)[0]
        field = random_half_space(rng, 1, lo=0.3)[0]
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        fd = xi[0] ** (2 * alpha) * n @ _fd_grad(lambda s: f(field, s, alpha), xi)
        got = conormal(kind, xi, n, field, alpha)
        assert_allclose(got, fd, rtol=1e-6, atol=1e-10)


def test_regularized_conormal_matches_raw(rng):
    xi, field = random_half_space(rng, 200), random_half_space(rng, 200)
    n = rng.normal(size=(200, 3))
    n /= np.linalg.norm(n, axis=1)[:, None]
    assert_allclose(conormal_q1(xi, n, field, 0.2), conormal_q1_raw(xi, n, field, 0.2), rtol=1e-9, atol=1e-12)
    assert_allclose(conormal_q2(xi, n, field, 0.2), conormal_q2_raw(xi, n, field, 0.2), rtol=1e-9, atol=1e-12)


def test_conormal_of_field_symmetry(rng):
    xi, src = random_half_space(rng, 20), random_half_space(rng, 20)
    n = rng.normal(size=(20, 3))
    n /= np.linalg.norm(n, axis=1)[:, None]
    for kind in ("Q1", "Q2"):
        assert_allclose(conormal_of_field(kind, xi, n, src, 0.3), conormal(kind, xi, n, src, 0.3), rtol=1e-13)


def test_grad_field_matches_fd(rng):
    p, q = random_half_space(rng, 2, lo=0.3)
    for kind, f in (("Q1", q1), ("Q2", q2)):
        assert_allclose(grad_q_field(kind, p, q, 0.35), _fd_grad(lambda s: f(s, q, 0.35), p), rtol=1e-6, atol=1e-10)


def test_weak_singularity_bound(rng):
    # |B q1| r1^{2a} r stays bounded as the points approach each other
    alpha = 0.25
    xi = np.array([0.6, 0.2, -0.1])
    n = np.array([0.8, 0.6, 0.0])
    vals = []
    for d in 10.0 ** -np.arange(1, 6):
        field = xi + d * np.array([0.3, -0.5, 0.81])
        r = np.linalg.norm(field - xi)
        r1 = math.hypot(field[0] + xi[0], *(field[1:] - xi[1:]))
        vals.append(abs(conormal_q1(xi, n, field, alpha)) * r1 ** (2 * alpha) * r)
    assert max(vals) < 10 * min(vals[-2:])


def test_far_field_decay():
    alpha = 0.25
    xi, n = np.array([0.5, 0.1, 0.2]), np.array([0.6, 0.0, 0.8])
    R = np.array([50.0, 100.0, 200.0])
    vals = [abs(conormal_q1(xi, n, np.array([0.3, r, 0.2 * r]), alpha)) for r in R]
    slope = np.polyfit(np.log(R), np.log(vals), 1)[0]
    assert_allclose(slope, -2 - 2 * alpha, atol=0.05)


def test_degenerate_plane_flux_of_q1_vanishes():
    alpha, q = 0.25, np.array([0.7, 0.2, -0.3])
    vals = [abs(x ** (2 * alpha) * grad_q_field("Q1", np.array([x, 0.1, 0.1]), q, alpha)[0]) for x in (1e-2, 1e-3, 1e-4)]
    assert vals[0] > vals[1] > vals[2]
