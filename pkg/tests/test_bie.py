import numpy as np
import pytest
from numpy.testing import assert_allclose

from singular_bie import EigenvalueCaseError, NystromSystem, SingularSystemError, assemble, solve_density
from singular_bie.bie import kernel_matrix, surface_flux_constant
from singular_bie.exceptions import ParameterError
from singular_bie.kernels import KernelKind, SingularityParams, conormal

ALPHA = 0.25


def test_kernel_matrix_entries(grid16):
    W = kernel_matrix("Q1", grid16, ALPHA)
    assert W.shape == (grid16.size, grid16.size)
    assert np.all(np.diag(W) == 0)
    i, j = 17, 140
    k = conormal("Q1", grid16.points[j], grid16.normals[j], grid16.points[i], ALPHA)
    assert_allclose(W[i, j], grid16.weights[j] * k, rtol=1e-13)


@pytest.mark.parametrize("kind", ["Q1", "Q2"])
@pytest.mark.parametrize("lam", [2.0, -2.0])
def test_row_sums_reproduce_constant_density(kind, lam, grid16):
    # A 1 = 1 - lam * (value of the unit double layer on the surface)
    A = assemble(kind, grid16, ALPHA, lam)
    want = 1.0 - lam * surface_flux_constant(kind, grid16, ALPHA)
    assert_allclose(A.apply(np.ones(grid16.size)), want, atol=1e-12)


def test_q1_eigenvalue_case(grid24):
    A = assemble("Q1", grid24, ALPHA, -2.0)
    assert A.is_eigenvalue_case
    assert np.abs(A.apply(np.ones(grid24.size))).max() <= 5e-3
    with pytest.raises(EigenvalueCaseError) as err:
        solve_density(A, np.ones(grid24.size))
    assert err.value.condition == np.inf


def test_condition_estimates(grid24):
    for kind, lam in (("Q1", 2.0), ("Q2", 2.0), ("Q2", -2.0)):
        A = assemble(kind, grid24, ALPHA, lam)
        est = A.condition_estimate()
        exact = np.linalg.cond(A.matrix, 1)
        assert est < 1e6
        assert exact / 3 <= est <= exact * 1.0001


def test_solve_recovers_density(grid16, rng):
    A = assemble("Q2", grid16, 0.3, 2.0)
    mu = rng.normal(size=grid16.size)
    got = solve_density(A, A.apply(mu))
    assert_allclose(got.values, mu, rtol=1e-10, atol=1e-10)
    with pytest.raises(ParameterError):
        solve_density(A, np.ones(5))


def test_singular_system_reported(grid16):
    A = assemble("Q1", grid16, ALPHA, 2.0)
    M = A.matrix.copy()
    M[3] = M[4]
    bad = NystromSystem(M, 2.0, KernelKind.Q1, grid16, SingularityParams(ALPHA))
    with pytest.raises(SingularSystemError) as err:
        solve_density(bad, np.ones(grid16.size))
    assert err.value.condition is not None and err.value.condition > 1e12


def test_thread_count_does_not_change_matrix(grid16, monkeypatch):
    W1 = kernel_matrix("Q2", grid16, ALPHA)
    monkeypatch.setenv("SINGULAR_BIE_THREADS", "3")
    W3 = kernel_matrix("Q2", grid16, ALPHA)
    assert np.array_equal(W1, W3)
