"""scikit-learn style wrappers around the half-ball / surface solvers.

``fit`` takes the boundary data and solves for the layer density;
``predict`` evaluates u at interior points given as an (n, 3) array.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .bvp import BvpProblem, evaluate_solution, solve
from .exceptions import ParameterError
from .geometry import make_hemisphere
from .hemisphere import HalfBall, poisson_dirichlet, poisson_holmgren
from .kernels import SingularityParams

__all__ = ["DirichletSolver", "HolmgrenSolver"]


class _HalfBallSolver(RegressorMixin, BaseEstimator):
    _kind = None

    def __init__(self, alpha=0.25, radius=1.0, n_s=32, n_t=32, n_r=48, n_phi=64, method="bie"):
        self.alpha = alpha
        self.radius = radius
        self.n_s = n_s
        self.n_t = n_t
        self.n_r = n_r
        self.n_phi = n_phi
        self.method = method

    def _validate(self):
        sp = SingularityParams.coerce(self.alpha)
        if not self.radius > 0:
            raise ParameterError(f"radius must be positive, got {self.radius!r}")
        if self.method not in ("bie", "poisson"):
            raise ParameterError(f"method must be 'bie' or 'poisson', got {self.method!r}")
        return sp

    def fit(self, phi, plane_data=0.0):
        """Solve with surface data ``phi(points)`` and plane data ``g(y, z)``.

        ``plane_data`` is tau1 for the Dirichlet problem and nu1 for the
        Holmgren problem; callables or constants are accepted.
        """
        sp = self._validate()
        self.problem_ = BvpProblem(
            sp,
            make_hemisphere(self.radius),
            self._kind,
            phi,
            plane_data,
            n_s=self.n_s,
            n_t=self.n_t,
            n_r=self.n_r,
            n_phi=self.n_phi,
        )
        if self.method == "bie":
            self.solution_ = solve(self.problem_)
        else:
            self.solution_ = HalfBall(self.radius, self.n_s, self.n_t, self.n_r, self.n_phi)
        self.n_features_in_ = 3
        return self

    def predict(self, X):
        check_is_fitted(self, "solution_")
        X = check_array(X, ensure_min_features=3)
        if X.shape[1] != 3:
            raise ValueError(f"expected points with 3 coordinates, got {X.shape[1]}")
        if self.method == "bie":
            return np.atleast_1d(evaluate_solution(self.solution_, X))
        pr = self.problem_
        fn = poisson_dirichlet if self._kind == "dirichlet" else poisson_holmgren
        return np.atleast_1d(fn(self.solution_, pr.plane_data, pr.phi, X, pr.sp))


class DirichletSolver(_HalfBallSolver):
    """Dirichlet problem in the half-ball: u = phi on the hemisphere, u = tau1 on the disk."""

    _kind = "dirichlet"


class HolmgrenSolver(_HalfBallSolver):
    """Holmgren problem in the half-ball: u = phi on the hemisphere, x^(2a) u_x -> nu1 on the disk."""

    _kind = "holmgren"
