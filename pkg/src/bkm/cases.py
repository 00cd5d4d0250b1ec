"""Built-in benchmark problems with exact solutions and published reference data.

Six classic verification problems on the ellipse (semi-axes 2 and 1): a
homogeneous wide-field problem, the potential problem, two steady
advection-dominated problems, and two nonlinear products solved by the
boundary-only direct path.  Each case records the evaluation points and
previously published solution columns used for regression display, plus the
default discretization (knot counts and shape parameter) those columns were
produced with.

The two nonlinear cases live on the same ellipse translated to center (3, 0):
their evaluation grids are the linear grids shifted by +3 in x, and the
2/x data of the steady Burgers-type case is singular at x = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .drm import OperatorSpec
from .geometry import EllipseDomain, make_knot_set
from .gensol import Helmholtz2D
from .kernels import pair_for
from .solver import (BkmSolution, NonlinearTerm, ProblemSpec, solve_linear,
                     solve_nonlinear_boundary_only)

__all__ = ["BenchmarkCase", "CaseReport", "builtin", "case_names", "run_case"]

#: evaluation grid shared by the linear tables (duplicate origin row collapsed)
_POINTS_LINEAR = ((1.5, 0.0), (1.2, -0.35), (0.6, -0.45), (0.0, 0.0),
                  (0.9, 0.0), (0.3, 0.0))
_POINTS_CONVECTION = ((1.5, 0.0), (1.2, -0.35), (0.0, -0.45), (-0.6, -0.45),
                      (-1.5, 0.0), (0.3, 0.0), (-0.3, 0.0), (0.0, 0.0))
_POINTS_NONLINEAR = ((4.5, 0.0), (4.2, -0.35), (3.6, -0.45), (3.0, -0.45),
                     (2.4, -0.45), (1.8, -0.35), (1.5, 0.0), (3.9, 0.0),
                     (3.3, 0.0), (3.0, 0.0), (2.7, 0.0), (2.1, 0.0))


@dataclass(frozen=True)
class BenchmarkCase:
    name: str
    description: str
    problem: ProblemSpec
    exact: Callable
    eval_points: np.ndarray
    paper_columns: dict            # published reference columns, display only
    default_boundary: int
    default_interior: int
    default_rbf: str
    default_shape: Optional[float]

    def original_residual(self, x, y, h=1e-4):
        """Finite-difference residual of the case's original governing
        equation at (x, y), evaluated on the exact solution."""
        u = self.exact
        lap = (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h)
               - 4.0 * u(x, y)) / (h * h)
        res = lap
        # shifted form lap(u) + u = f + S{u}  =>  original residual is
        # lap(u) + u - S{u} + nonlinear products - f
        res = res + u(x, y)
        if self.problem.source_operator is not None:
            for term in self.problem.source_operator.terms:
                res = res - term.coeff_at(np.column_stack([np.atleast_1d(x),
                                                           np.atleast_1d(y)]))[0] \
                    * _fd_derivative(u, term.dx, term.dy, x, y, h)
        if self.problem.nonlinear_terms:
            for term in self.problem.nonlinear_terms:
                d = _fd_derivative(u, term.dx, term.dy, x, y, h)
                res = res + (d * u(x, y) if term.multiplies_u else d)
        if self.problem.forcing is not None:
            res = res - self.problem.forcing(x, y)
        return float(res)


def _fd_derivative(u, dx, dy, x, y, h):
    if (dx, dy) == (0, 0):
        return u(x, y)
    if (dx, dy) == (1, 0):
        return (u(x + h, y) - u(x - h, y)) / (2 * h)
    if (dx, dy) == (0, 1):
        return (u(x, y + h) - u(x, y - h)) / (2 * h)
    if (dx, dy) == (2, 0):
        return (u(x + h, y) - 2 * u(x, y) + u(x - h, y)) / (h * h)
    if (dx, dy) == (0, 2):
        return (u(x, y + h) - 2 * u(x, y) + u(x, y - h)) / (h * h)
    raise ValueError(f"unsupported derivative ({dx}, {dy})")


def _ellipse(center_x=0.0):
    return EllipseDomain(center=(center_x, 0.0), semi_major=2.0, semi_minor=1.0)


def _helmholtz_case() -> BenchmarkCase:
    exact = lambda x, y: np.sin(x)
    problem = ProblemSpec(
        kernel=Helmholtz2D(1.0),
        dirichlet=exact,
        domain=_ellipse(),
    )
    return BenchmarkCase(
        name="helmholtz",
        description="lap(u) + u = 0 with u = sin x on the boundary",
        problem=problem,
        exact=exact,
        eval_points=np.array(_POINTS_LINEAR),
        paper_columns={
            "DRBEM (33)": (0.994, 0.928, 0.562, 0.0, 0.780, 0.294),
            "BKM (7)": (0.999, 0.931, 0.557, 0.0, 0.779, 0.289),
            "BKM (11)": (0.997, 0.932, 0.565, 0.0, 0.783, 0.296),
        },
        default_boundary=11,
        default_interior=0,
        default_rbf="mq",
        default_shape=None,
    )


def _laplace_case() -> BenchmarkCase:
    exact = lambda x, y: x + y
    problem = ProblemSpec(
        kernel=Helmholtz2D(1.0),
        dirichlet=exact,
        domain=_ellipse(),
        source_operator=OperatorSpec.identity(),
        rbf_pair=pair_for("mq", 25.0),
    )
    return BenchmarkCase(
        name="laplace",
        description="lap(u) = 0 with u = x + y, shifted to lap(u) + u = u",
        problem=problem,
        exact=exact,
        eval_points=np.array(_POINTS_LINEAR),
        paper_columns={
            "BEM (16)": (1.507, 0.857, 0.154, -0.451, 0.913, 0.304),
            "BKM (3)": (1.500, 0.850, 0.150, -0.450, 0.900, 0.300),
            "BKM (5)": (1.500, 0.850, 0.150, -0.450, 0.900, 0.300),
        },
        default_boundary=5,
        default_interior=0,
        default_rbf="mq",
        default_shape=25.0,
    )


def _convdiff_x_case() -> BenchmarkCase:
    exact = lambda x, y: np.exp(-x)
    problem = ProblemSpec(
        kernel=Helmholtz2D(1.0),
        dirichlet=exact,
        domain=_ellipse(),
        # lap(u) = -du/dx  =>  lap(u) + u = u - du/dx
        source_operator=OperatorSpec(terms=((0, 0, 1.0), (1, 0, -1.0))),
        rbf_pair=pair_for("mq", 4.0),
    )
    return BenchmarkCase(
        name="convdiff_x",
        description="lap(u) = -du/dx with u = e^{-x}",
        problem=problem,
        exact=exact,
        eval_points=np.array(_POINTS_CONVECTION),
        paper_columns={
            "DRBEM (33)": (0.229, 0.307, 1.003, 1.819, 4.489, 0.745, 1.348, 1.002),
            "BKM (15)": (0.229, 0.301, 1.010, 1.822, 4.484, 0.744, 1.353, 1.003),
            "BKM (18)": (0.224, 0.305, 1.000, 1.818, 4.477, 0.743, 1.354, 1.004),
        },
        default_boundary=7,
        default_interior=11,
        default_rbf="mq",
        default_shape=4.0,
    )


def _convdiff_xy_case() -> BenchmarkCase:
    exact = lambda x, y: np.exp(-x) + np.exp(-y)
    problem = ProblemSpec(
        kernel=Helmholtz2D(1.0),
        dirichlet=exact,
        domain=_ellipse(),
        source_operator=OperatorSpec(terms=((0, 0, 1.0), (1, 0, -1.0), (0, 1, -1.0))),
        rbf_pair=pair_for("mq", 5.5),
    )
    return BenchmarkCase(
        name="convdiff_xy",
        description="lap(u) = -du/dx - du/dy with u = e^{-x} + e^{-y}",
        problem=problem,
        exact=exact,
        eval_points=np.array(_POINTS_CONVECTION),
        paper_columns={
            "DRBEM (33)": (1.231, 1.714, 2.557, 3.378, 5.485, 1.731, 2.335, 1.989),
            "BKM (15)": (1.225, 1.725, 2.546, 3.403, 5.490, 1.729, 2.349, 1.992),
            "BKM (18)": (1.224, 1.723, 2.551, 3.405, 5.491, 1.731, 2.350, 1.993),
        },
        default_boundary=7,
        default_interior=11,
        default_rbf="mq",
        default_shape=5.5,
    )


def _nonlinear_poisson_case() -> BenchmarkCase:
    exact = lambda x, y: x ** 2
    problem = ProblemSpec(
        kernel=Helmholtz2D(1.0),
        dirichlet=exact,
        domain=_ellipse(center_x=3.0),
        source_operator=OperatorSpec.identity(),
        forcing=lambda x, y: 2.0 + 2.0 * x ** 2,
        rbf_pair=pair_for("mq", 2.0),
        nonlinear_terms=(NonlinearTerm(2, 0, True),),
    )
    return BenchmarkCase(
        name="nonlinear_poisson",
        description="lap(u) + u_xx u = 2 + 2x^2 with u = x^2, boundary-only one-step",
        problem=problem,
        exact=exact,
        eval_points=np.array(_POINTS_NONLINEAR),
        paper_columns={
            "BKM (5)": (20.34, 17.74, 13.07, 9.09, 5.82, 3.26,
                        2.25, 15.36, 11.03, 9.12, 7.38, 4.46),
        },
        default_boundary=5,
        default_interior=0,
        default_rbf="mq",
        default_shape=2.0,
    )


def _burger_case() -> BenchmarkCase:
    exact = lambda x, y: 2.0 / x
    problem = ProblemSpec(
        kernel=Helmholtz2D(1.0),
        dirichlet=exact,
        domain=_ellipse(center_x=3.0),
        source_operator=OperatorSpec.identity(),
        rbf_pair=pair_for("mq", 1.0),
        nonlinear_terms=(NonlinearTerm(1, 0, True),),
    )
    return BenchmarkCase(
        name="burger",
        description="steady lap(u) + u_x u = 0 with u = 2/x, boundary-only one-step",
        problem=problem,
        exact=exact,
        eval_points=np.array(_POINTS_NONLINEAR),
        paper_columns={
            "BKM (5)": (0.479, 0.515, 0.585, 0.666, 0.808, 1.089,
                        1.300, 0.563, 0.632, 0.672, 0.725, 0.918),
        },
        default_boundary=5,
        default_interior=0,
        default_rbf="mq",
        default_shape=1.0,
    )


_BUILDERS = {
    "helmholtz": _helmholtz_case,
    "laplace": _laplace_case,
    "convdiff_x": _convdiff_x_case,
    "convdiff_xy": _convdiff_xy_case,
    "nonlinear_poisson": _nonlinear_poisson_case,
    "burger": _burger_case,
}


def case_names():
    return tuple(_BUILDERS)


def builtin(name: str) -> BenchmarkCase:
    """Look up a benchmark case by name."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(
            f"unknown case {name!r}; valid names: {', '.join(_BUILDERS)}") from None
    return builder()


@dataclass
class CaseReport:
    case: str
    rows: list            # dicts: x, y, exact, computed, rel_err_pct (None at zeros)
    summary: dict
    solution: BkmSolution

    def average_abs_rel_err(self) -> float:
        return self.summary["avg_abs_rel_err_pct"]


def run_case(case: BenchmarkCase, boundary_n: Optional[int] = None,
             interior_l: Optional[int] = None, rbf: Optional[str] = None,
             shape: Optional[float] = None, eval_points=None) -> CaseReport:
    """Solve a benchmark case and tabulate it at its evaluation points.

    Relative errors follow the convention of the published tables:
    100 (exact - computed) / exact, left blank where the exact value is zero.
    """
    n = case.default_boundary if boundary_n is None else int(boundary_n)
    l = case.default_interior if interior_l is None else int(interior_l)
    problem = case.problem
    if rbf is not None or shape is not None:
        family = rbf if rbf is not None else case.default_rbf
        c = shape if shape is not None else case.default_shape
        if problem.rbf_pair is not None:
            problem = _replace_pair(problem, family, c)
    if problem.is_nonlinear and l != 0:
        raise ValueError("nonlinear cases are boundary-only; interior knots are "
                         "not allowed")

    knots = make_knot_set(problem.domain, n, l)
    if problem.is_nonlinear:
        solution = solve_nonlinear_boundary_only(problem, knots)
    else:
        solution = solve_linear(problem, knots)

    pts = case.eval_points if eval_points is None else np.atleast_2d(
        np.asarray(eval_points, dtype=float))
    computed = solution.evaluate(pts)
    exact = case.exact(pts[:, 0], pts[:, 1])

    rows = []
    rels = []
    for (x, y), ex, cv in zip(pts, exact, computed):
        if abs(ex) > 1e-300:
            rel = float(100.0 * (ex - cv) / ex)
            rels.append(abs(rel))
        else:
            rel = None
        rows.append({"x": float(x), "y": float(y), "exact": float(ex),
                     "computed": float(cv), "rel_err_pct": rel})

    summary = {
        "case": case.name,
        "n_boundary": n,
        "n_interior": l,
        "avg_abs_rel_err_pct": float(np.mean(rels)) if rels else None,
        "max_abs_err": float(np.max(np.abs(computed - exact))),
        "condition_estimate_drm": solution.diagnostics.get("condition_interpolation"),
        "condition_estimate_bkm": solution.diagnostics.get("condition_collocation"),
    }
    return CaseReport(case.name, rows, summary, solution)


def _replace_pair(problem: ProblemSpec, family: str, shape) -> ProblemSpec:
    from dataclasses import replace

    return replace(problem, rbf_pair=pair_for(family, shape))
