"""Real-valued Gamma, Pochhammer and Gauss hypergeometric functions.

Everything here works on real parameters only.  ``gauss_2f1`` accepts a
scalar or an array for the argument ``z`` (parameters stay scalar), which is
what the kernel assembly needs: one parameter triple, a million arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError, ParameterError, PoleError

__all__ = [
    "HypergeomParams",
    "gamma_fn",
    "rgamma",
    "pochhammer",
    "gauss_2f1",
    "hyp2f1",
]

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

Z_SWITCH = 0.5
SERIES_RTOL = 1e-16
SERIES_MAX_TERMS = 10000
_INTEGER_TOL = 1e-9
_DEGENERATE_SHIFT = 1e-5


def _is_nonpositive_integer(t: float) -> bool:
    return t <= 0 and abs(t - round(t)) < _INTEGER_TOL


def _lanczos(t: float) -> float:
    # valid for t >= 0.5
    t -= 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, 9):
        acc += _LANCZOS_COEF[i] / (t + i)
    w = t + _LANCZOS_G + 0.5
    return _SQRT_2PI * w ** (t + 0.5) * math.exp(-w) * acc


def gamma_fn(t: float) -> float:
    """Gamma function for real ``t`` away from the poles 0, -1, -2, ...

    Uses a Lanczos sum on ``[1, 2)`` and walks there with ``G(t+1) = t G(t)``
    (upwards for small or negative ``t``, downwards for large ``t``).
    """
    t = float(t)
    if _is_nonpositive_integer(t):
        raise PoleError(f"Gamma has a pole at t={t:g}")
    if t > 171.7:
        return math.inf
    if t < 1.0:
        # G(t) = G(t + n) / (t (t+1) ... (t+n-1))
        n = int(math.ceil(1.0 - t))
        den = 1.0
        for k in range(n):
            den *= t + k
        return _lanczos(t + n) / den
    if t < 12.0:
        n = int(math.floor(t)) - 1
        base = t - n
        val = _lanczos(base)
        for k in range(n):
            val *= base + k
        return val
    return _lanczos(t)


def rgamma(t: float) -> float:
    """Reciprocal Gamma, 0 at the poles."""
    if _is_nonpositive_integer(t):
        return 0.0
    return 1.0 / gamma_fn(t)


def pochhammer(t: float, n: int) -> float:
    """Rising factorial ``t (t+1) ... (t+n-1)``; ``(t)_0 = 1``."""
    if n < 0 or int(n) != n:
        raise ParameterError(f"pochhammer needs a nonnegative integer n, got {n!r}")
    out = 1.0
    for k in range(int(n)):
        out *= t + k
    return out


@dataclass(frozen=True)
class HypergeomParams:
    """Parameters of F(a, b; c; z) with z <= 1."""

    a: float
    b: float
    c: float
    z: float = 0.0

    def __post_init__(self):
        if _is_nonpositive_integer(self.c):
            raise ParameterError(f"c must not be a nonpositive integer (c={self.c:g})")
        if self.z > 1.0:
            raise ParameterError(f"only z <= 1 is supported (z={self.z:g})")
        if self.z == 1.0 and self.c - self.a - self.b <= 0 and not self._terminating:
            raise ConvergenceError(
                f"F(a,b;c;1) diverges for c-a-b={self.c - self.a - self.b:g} <= 0"
            )

    @property
    def _terminating(self) -> bool:
        return _is_nonpositive_integer(self.a) or _is_nonpositive_integer(self.b)


def _series(a, b, c, z, max_terms=SERIES_MAX_TERMS):
    """Direct Gauss series; stops after three consecutive negligible terms."""
    z = np.asarray(z, dtype=float)
    total = np.ones_like(z)
    term = np.ones_like(z)
    quiet = 0
    for k in range(max_terms):
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1.0))) * z
        total = total + term
        if not np.any(term):
            return total
        if np.all(np.abs(term) <= SERIES_RTOL * np.abs(total)):
            quiet += 1
            if quiet >= 3:
                return total
        else:
            quiet = 0
    raise ConvergenceError(
        f"2F1 series for ({a:g},{b:g};{c:g}) not converged after {max_terms} terms"
    )


def _polynomial(a, b, c, z):
    # a is a nonpositive integer: finite sum, valid for every z
    n = int(round(-a))
    z = np.asarray(z, dtype=float)
    total = np.ones_like(z)
    term = np.ones_like(z)
    for k in range(n):
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1.0))) * z
        total = total + term
    return total


def _gauss_sum(a, b, c):
    return gamma_fn(c) * gamma_fn(c - a - b) * rgamma(c - a) * rgamma(c - b)


def _connection(a, b, c, z):
    """Map z in (0.5, 1) onto 1 - z in (0, 0.5)."""
    s = c - a - b
    if abs(s - round(s)) < _INTEGER_TOL:
        # log case: average two shifted evaluations (error O(shift^2))
        h = _DEGENERATE_SHIFT
        return 0.5 * (_connection(a, b, c + h, z) + _connection(a, b, c - h, z))
    w = 1.0 - np.asarray(z, dtype=float)
    out = np.zeros_like(w)
    A = gamma_fn(c) * gamma_fn(s) * rgamma(c - a) * rgamma(c - b)
    if A != 0.0:
        out = out + A * _series(a, b, 1.0 - s, w)
    B = gamma_fn(c) * gamma_fn(-s) * rgamma(a) * rgamma(b)
    if B != 0.0:
        out = out + B * w**s * _series(c - a, c - b, 1.0 + s, w)
    return out


def _hyp2f1_unit(a, b, c, z):
    """F for z in [0, 1]."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    lo = z <= Z_SWITCH
    one = z == 1.0
    mid = ~lo & ~one
    if np.any(lo):
        out[lo] = _series(a, b, c, z[lo])
    if np.any(mid):
        out[mid] = _connection(a, b, c, z[mid])
    if np.any(one):
        out[one] = _gauss_sum(a, b, c)
    return out


def hyp2f1(a: float, b: float, c: float, z):
    """Vectorized F(a, b; c; z) for real z <= 1.

    Strategy: direct series on ``[0, 0.5]``, the ``1 - z`` connection formula
    on ``(0.5, 1)``, Gauss summation at ``z = 1`` and the Pfaff transformation
    ``F(a,b;c;z) = (1-z)^{-b} F(c-a, b; c; z/(z-1))`` for ``z < 0``.
    """
    a, b, c = float(a), float(b), float(c)
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if _is_nonpositive_integer(c):
        raise ParameterError(f"c must not be a nonpositive integer (c={c:g})")
    if np.any(z > 1.0) or np.any(np.isnan(z)):
        raise ParameterError("argument must satisfy z <= 1")
    terminating = _is_nonpositive_integer(a) or _is_nonpositive_integer(b)
    if np.any(z == 1.0) and c - a - b <= 0 and not terminating:
        raise ConvergenceError(f"F(a,b;c;1) diverges for c-a-b={c - a - b:g} <= 0")

    if terminating:
        if not _is_nonpositive_integer(a):
            a, b = b, a
        out = _polynomial(a, b, c, z)
        return float(out[0]) if scalar else out

    out = np.empty_like(z)
    neg = z < 0.0
    pos = ~neg
    if np.any(pos):
        out[pos] = _hyp2f1_unit(a, b, c, z[pos])
    if np.any(neg):
        zn = z[neg]
        w = zn / (zn - 1.0)
        if _is_nonpositive_integer(c - a):
            inner = _polynomial(c - a, b, c, w)
        else:
            inner = _hyp2f1_unit(c - a, b, c, w)
        out[neg] = (1.0 - zn) ** (-b) * inner
    return float(out[0]) if scalar else out


def gauss_2f1(p: HypergeomParams) -> float:
    """F(a, b; c; z) for a validated parameter set."""
    return hyp2f1(p.a, p.b, p.c, p.z)
