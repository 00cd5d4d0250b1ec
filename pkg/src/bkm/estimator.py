"""Scikit-learn estimator facade over the boundary-knot solver.

``fit`` takes boundary knot coordinates and their Dirichlet values, solves
the collocation system, and ``predict`` evaluates the field anywhere, so the
solver slots into pipelines, grid searches (e.g. over the multiquadric shape
parameter) and cross-validation like any other regressor.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .geometry import BOUNDARY, INTERIOR, Knot, KnotSet
from .gensol import GeneralSolutionKernel, Helmholtz2D
from .kernels import pair_for
from .solver import ProblemSpec, solve_linear, solve_nonlinear_boundary_only

__all__ = ["BoundaryKnotSolver"]


class BoundaryKnotSolver(BaseEstimator, RegressorMixin):
    """Meshless boundary-collocation solver with a fit/predict interface.

    Parameters
    ----------
    kernel : GeneralSolutionKernel, optional
        Homogeneous-layer kernel; defaults to the unit-wavenumber wide-field
        kernel, which matches the shifted form lap(u) + u = f + S{u}.
    source_operator : OperatorSpec or None
        S in the shifted form.  None (with no forcing) solves the pure
        homogeneous problem by kernel collocation alone.
    forcing : callable or None
        f(x, y) of the shifted form.
    rbf : str
        Radial family backing the particular-solution stage: "mq", "tps" or
        "linear".
    shape : float
        Multiquadric shape parameter (ignored by the other families).
    nonlinear_terms : sequence of (dx, dy, multiplies_u) or None
        Switches fit to the boundary-only direct path.
    boundary_field : callable or None
        Dirichlet data as a field formula; required by the direct path's
        default derivative reconstruction.  When absent the direct path falls
        back to interpolant-based derivatives.

    Attributes (after fit)
    ----------------------
    solution_ : BkmSolution
    beta_, alpha_ : solved coefficient vectors
    interior_values_ : solved field values at interior knots
    """

    def __init__(self, kernel: Optional[GeneralSolutionKernel] = None,
                 source_operator=None, forcing=None, rbf: str = "mq",
                 shape: float = 2.0, nonlinear_terms=None, boundary_field=None):
        self.kernel = kernel
        self.source_operator = source_operator
        self.forcing = forcing
        self.rbf = rbf
        self.shape = shape
        self.nonlinear_terms = nonlinear_terms
        self.boundary_field = boundary_field

    def _problem(self, values_lookup) -> ProblemSpec:
        kernel = self.kernel if self.kernel is not None else Helmholtz2D(1.0)
        needs_pair = (self.forcing is not None or self.nonlinear_terms is not None
                      or (self.source_operator is not None
                          and bool(self.source_operator.terms)))
        pair = pair_for(self.rbf, self.shape) if needs_pair else None
        if self.nonlinear_terms is not None and self.boundary_field is None:
            derivative_source = "interpolant"
        else:
            derivative_source = "boundary_data"
        dirichlet = self.boundary_field if self.boundary_field is not None else values_lookup
        return ProblemSpec(
            kernel=kernel,
            dirichlet=dirichlet,
            source_operator=self.source_operator,
            forcing=self.forcing,
            rbf_pair=pair,
            nonlinear_terms=(tuple(self.nonlinear_terms)
                             if self.nonlinear_terms is not None else None),
            nonlinear_derivative_source=derivative_source,
        )

    def fit(self, X, y, interior=None):
        """Solve the collocation system from boundary data.

        X is (n, 2) boundary knot coordinates, y the Dirichlet values there;
        ``interior`` optionally adds (l, 2) interior response knots (linear
        problems only).
        """
        X = check_array(X, ensure_2d=True, dtype=float)
        y = check_array(y, ensure_2d=False, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"boundary knots must be 2D points, got {X.shape[1]} columns")
        if y.shape != (X.shape[0],):
            raise ValueError(f"need one boundary value per knot: {X.shape[0]} knots, "
                             f"y shape {y.shape}")
        boundary = [Knot(p, BOUNDARY) for p in X]
        interior_knots = []
        if interior is not None:
            interior = check_array(interior, ensure_2d=True, dtype=float)
            if interior.shape[1] != 2:
                raise ValueError("interior knots must be 2D points")
            interior_knots = [Knot(p, INTERIOR) for p in interior]
        knots = KnotSet(boundary, interior_knots)

        # exact nearest-knot lookup: the solver only ever queries the
        # Dirichlet data at the fitted boundary knots themselves
        def values_lookup(qx, qy):
            q = np.column_stack([np.atleast_1d(qx), np.atleast_1d(qy)])
            d = np.linalg.norm(q[:, None, :] - X[None, :, :], axis=-1)
            idx = np.argmin(d, axis=1)
            if np.any(d[np.arange(len(q)), idx] > 1e-9):
                raise ValueError("Dirichlet data was queried away from the fitted knots; "
                                 "pass boundary_field for off-knot data")
            out = y[idx]
            return out[0] if np.isscalar(qx) else out

        problem = self._problem(values_lookup)
        if problem.is_nonlinear:
            if interior_knots:
                raise ValueError("nonlinear problems are boundary-only")
            self.solution_ = solve_nonlinear_boundary_only(problem, knots)
        else:
            self.solution_ = solve_linear(problem, knots)
        self.beta_ = self.solution_.beta
        self.alpha_ = self.solution_.alpha
        self.interior_values_ = self.solution_.interior_values
        self.diagnostics_ = self.solution_.diagnostics
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        """Evaluate the solved field at query points (n, 2)."""
        check_is_fitted(self, "solution_")
        X = check_array(X, ensure_2d=True, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} coordinates per point, "
                             f"got {X.shape[1]}")
        return self.solution_.evaluate(X)
