import math

import mpmath as mp
import numpy as np
import pytest

from singular_bie import build_surface_grid, make_hemisphere


def q1_oracle(p, q, alpha):
    """(1/2pi) r^{-1-2a} F(a+1/2, a; 2a; sigma) with mpmath's 2F1."""
    r2 = sum((pi - qi) ** 2 for pi, qi in zip(p, q))
    r12 = r2 + 4 * p[0] * q[0]
    sigma = 1 - mp.mpf(r12) / r2
    return float(mp.mpf(r2) ** (-alpha - 0.5) * mp.hyp2f1(alpha + 0.5, alpha, 2 * alpha, sigma) / (2 * mp.pi))


def q2_oracle(p, q, alpha):
    r2 = sum((pi - qi) ** 2 for pi, qi in zip(p, q))
    r12 = r2 + 4 * p[0] * q[0]
    sigma = 1 - mp.mpf(r12) / r2
    xx = mp.mpf(p[0] * q[0])
    val = mp.mpf(r2) ** (alpha - 1.5) * xx ** (1 - 2 * alpha) * mp.hyp2f1(1.5 - alpha, 1 - alpha, 2 - 2 * alpha, sigma)
    return float(val / (2 * mp.pi))


def random_half_space(rng, n, lo=0.2, hi=2.0):
    p = rng.uniform(-hi, hi, size=(n, 3))
    p[:, 0] = rng.uniform(lo, hi, size=n)
    return p


def interior_points(rng, n, r_lo=0.1, r_hi=0.8, x_min=0.05, a=1.0):
    d = rng.normal(size=(n, 3))
    d[:, 0] = np.abs(d[:, 0])
    d /= np.linalg.norm(d, axis=1)[:, None]
    p = a * d * rng.uniform(r_lo, r_hi, size=(n, 1))
    p[:, 0] = np.maximum(p[:, 0], x_min * a)
    return p


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def hemi():
    return make_hemisphere(1.0)


@pytest.fixture(scope="session")
def grid16(hemi):
    return build_surface_grid(hemi, 16, 16)


@pytest.fixture(scope="session")
def grid24(hemi):
    return build_surface_grid(hemi, 24, 24)


@pytest.fixture(scope="session")
def grid32(hemi):
    return build_surface_grid(hemi, 32, 32)


HEMI_AREA = 2 * math.pi
