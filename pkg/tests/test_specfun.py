import math

import mpmath as mp
import numpy as np
import pytest
from numpy.testing import assert_allclose

from singular_bie import ConvergenceError, HypergeomParams, ParameterError, PoleError
from singular_bie import gamma_fn, gauss_2f1, hyp2f1
from singular_bie.specfun import pochhammer, rgamma


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 1.5, 2.75, 7.3, 12.5, 30.2, 120.0, -0.5, -1.3, -3.7])
def test_gamma_matches_mpmath(t):
    assert_allclose(gamma_fn(t), float(mp.gamma(t)), rtol=1e-13)


def test_gamma_half_and_integers():
    assert_allclose(gamma_fn(0.5), math.sqrt(math.pi), rtol=1e-14)
    for n in range(1, 12):
        assert_allclose(gamma_fn(n), math.factorial(n - 1), rtol=1e-14)


@pytest.mark.parametrize("t", [0, -1, -4])
def test_gamma_poles(t):
    with pytest.raises(PoleError):
        gamma_fn(t)
    assert rgamma(t) == 0.0


def test_pochhammer():
    assert pochhammer(2.5, 0) == 1.0
    assert_allclose(pochhammer(0.3, 5), float(mp.rf(0.3, 5)), rtol=1e-14)
    with pytest.raises(ParameterError):
        pochhammer(1.0, -1)


def test_hyp2f1_against_mpmath():
    rng = np.random.default_rng(0)
    for _ in range(40):
        a, b = rng.uniform(-2, 2, 2)
        c = rng.uniform(0.2, 3)
        z = rng.uniform(-5, 0.95)
        assert_allclose(hyp2f1(a, b, c, z), float(mp.hyp2f1(a, b, c, z)), rtol=1e-11, atol=1e-13)


def test_hyp2f1_vectorized_and_regimes():
    z = np.array([-20.0, -1.0, 0.0, 0.3, 0.5, 0.7, 0.99, 1.0])
    got = hyp2f1(0.75, 0.25, 1.5, z)
    want = [float(mp.hyp2f1(0.75, 0.25, 1.5, zi)) for zi in z]
    assert got.shape == z.shape
    assert_allclose(got, want, rtol=1e-12)


def test_hyp2f1_kernel_parameters():
    # the parameter triples used by the kernels, on co-sigma in [0, 1)
    z = np.linspace(0, 0.999, 25)
    for alpha in (0.1, 0.25, 0.4):
        for a, b, c in [(alpha - 0.5, alpha, 2 * alpha), (0.5 - alpha, 1 - alpha, 2 - 2 * alpha)]:
            want = [float(mp.hyp2f1(a, b, c, zi)) for zi in z]
            assert_allclose(hyp2f1(a, b, c, z), want, rtol=1e-12)


def test_terminating_series_is_polynomial():
    # F(-2, b; c; z) = 1 - 2bz/c + b(b+1)z^2/(c(c+1))
    b, c, z = 0.7, 1.3, -3.0
    want = 1 - 2 * b * z / c + b * (b + 1) * z**2 / (c * (c + 1))
    assert_allclose(hyp2f1(-2, b, c, z), want, rtol=1e-14)


def test_gauss_summation_and_params():
    p = HypergeomParams(0.3, 0.4, 2.0, 1.0)
    want = math.gamma(2.0) * math.gamma(1.3) / (math.gamma(1.7) * math.gamma(1.6))
    assert_allclose(gauss_2f1(p), want, rtol=1e-13)
    with pytest.raises(ConvergenceError):
        HypergeomParams(1.0, 1.0, 1.5, 1.0)
    with pytest.raises(ParameterError):
        HypergeomParams(1.0, 1.0, -2.0, 0.1)
    with pytest.raises(ParameterError):
        hyp2f1(0.5, 0.5, 1.0, 1.5)
