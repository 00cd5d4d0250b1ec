"""Boundary-knot collocation: assembly, dense solve, solution evaluation.

The governing problem is posed in shifted form

    lap(u) + u = f + S{u},        u = b1 on the Dirichlet part,
                                  du/dn = b2 on the flux part,

where S collects whatever the shift moved to the right-hand side (for a
problem lap(u) + L1{u} = f the shift gives S = identity - L1).  The
homogeneous layer is a sum of wide-field kernel translates centered at the
boundary knots; the inhomogeneous layer u_p comes from the dual-reciprocity
map u_p = P u + q, which is affine in the nodal values u.  Substituting the
map into the collocation rows produces one dense linear system in the
unknowns [beta | u at non-Dirichlet nodes].

Problems with no source content at all (f absent and S empty) skip the
dual-reciprocity stage entirely; the solve is then pure kernel collocation.

Nonlinear problems with product terms like u_xx * u are handled by the
boundary-only direct path: with every node on the Dirichlet boundary the
nodal u is known data, so the source g can be assembled outright and the
whole solve stays linear, one factorization per matrix, no iteration.
Interior knots are rejected there because they would turn the algebraic
system nonlinear.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import cdist

from .drm import DrmSystem, OperatorSpec
from .geometry import EllipseDomain, KnotSet
from .gensol import GeneralSolutionKernel, Helmholtz2D
from .kernels import ParticularPair
from .linalg import LuSolver

__all__ = [
    "NonlinearTerm",
    "ProblemSpec",
    "BkmSolution",
    "hadamard",
    "assemble_linear",
    "solve_linear",
    "solve_nonlinear_boundary_only",
    "evaluate",
]

#: step sizes for differentiating the boundary-data field in the direct path
_FD_STEP_FIRST = 1e-6
_FD_STEP_SECOND = 1e-4


def hadamard(a, b):
    """Elementwise product of same-shaped arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a * b


@dataclass(frozen=True)
class NonlinearTerm:
    """A product term D^(dx,dy) u (optionally times u) subtracted from the source."""

    dx: int
    dy: int
    multiplies_u: bool = True


@dataclass(frozen=True)
class ProblemSpec:
    """A boundary-value problem in the solver's shifted form.

    ``source_operator`` is S in g = f + S{u} (None or empty together with a
    missing forcing means no inhomogeneous layer at all).  ``rbf_pair`` backs
    the dual-reciprocity stage and must be present whenever the problem has
    source content.  ``nonlinear_terms`` switches to the boundary-only direct
    path; ``nonlinear_derivative_source`` selects how the derivative fields in
    those products are reconstructed:

    * ``"boundary_data"`` (default) differentiates the Dirichlet-data field by
      central differences.  The one-step path needs curvature information that
      a handful of boundary samples cannot supply through interpolation; the
      data field can.
    * ``"interpolant"`` pushes the derivatives through the radial interpolant
      of the nodal values.
    """

    kernel: GeneralSolutionKernel
    dirichlet: Callable
    domain: Optional[EllipseDomain] = None
    neumann: Optional[Callable] = None
    source_operator: Optional[OperatorSpec] = None
    forcing: Optional[Callable] = None
    rbf_pair: Optional[ParticularPair] = None
    nonlinear_terms: Optional[tuple] = None
    nonlinear_derivative_source: str = "boundary_data"

    def __post_init__(self):
        if self.nonlinear_terms is not None:
            object.__setattr__(self, "nonlinear_terms", tuple(
                t if isinstance(t, NonlinearTerm) else NonlinearTerm(*t)
                for t in self.nonlinear_terms))
        if self.nonlinear_derivative_source not in ("boundary_data", "interpolant"):
            raise ValueError("nonlinear_derivative_source must be "
                             "'boundary_data' or 'interpolant'")
        if self.needs_drm and self.rbf_pair is None:
            raise ValueError("a problem with source content needs an rbf_pair")
        if self.needs_drm and isinstance(self.kernel, Helmholtz2D) \
                and abs(self.kernel.wavenumber - 1.0) > 0:
            raise ValueError("the dual-reciprocity pairs are built for the "
                             "unit-wavenumber operator; shift the problem instead")

    @property
    def needs_drm(self) -> bool:
        has_source = self.source_operator is not None and bool(self.source_operator.terms)
        return has_source or self.forcing is not None or self.nonlinear_terms is not None

    @property
    def is_nonlinear(self) -> bool:
        return bool(self.nonlinear_terms)


@dataclass
class BkmSolution:
    """Solved coefficients plus everything needed to evaluate u anywhere."""

    beta: np.ndarray
    alpha: Optional[np.ndarray]
    interior_values: np.ndarray
    knots: KnotSet
    kernel: GeneralSolutionKernel
    drm: Optional[DrmSystem]
    diagnostics: dict = field(default_factory=dict)

    def evaluate(self, points) -> np.ndarray:
        """u(x) = sum_k beta_k K(x, x_k) + u_p(x) at one point or many."""
        pts = np.asarray(points, dtype=float)
        scalar = pts.ndim == 1
        pts = np.atleast_2d(pts)
        sources = self.knots.boundary_points()
        r = cdist(pts, sources)
        out = self.kernel.radial_profile(r) @ self.beta
        if self.alpha is not None:
            out = out + self.drm.basis_rows(pts) @ self.alpha
        return float(out[0]) if scalar else out


def evaluate(solution: BkmSolution, problem: ProblemSpec, x) -> float:
    """Module-level convenience for a single evaluation point."""
    return solution.evaluate(x)


@dataclass
class AssembledSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    knots: KnotSet
    neumann_mask: np.ndarray
    unknown_nodes: np.ndarray       # node indices of the non-Dirichlet unknowns
    drm: Optional[DrmSystem]
    alpha_map: Optional[tuple]      # (alpha_lin, alpha_const) when a DRM stage exists


def _data_values(fn, points):
    """Evaluate boundary data at (n, 2) points, broadcasting scalar results."""
    points = np.atleast_2d(points)
    out = np.asarray(fn(points[:, 0], points[:, 1]), dtype=float)
    return np.broadcast_to(out, (len(points),)).copy()


def _kernel_matrix(kernel, points, sources):
    return kernel.radial_profile(cdist(np.atleast_2d(points), np.atleast_2d(sources)))


def _kernel_normal_rows(kernel, points, normals, sources):
    points = np.atleast_2d(points)
    sources = np.atleast_2d(sources)
    rows = np.empty((len(points), len(sources)))
    for i, (p, n) in enumerate(zip(points, normals)):
        for k, s in enumerate(sources):
            rows[i, k] = kernel.normal_derivative(p, s, n)
    return rows


def assemble_linear(problem: ProblemSpec, knots: KnotSet,
                    neumann_mask=None) -> AssembledSystem:
    """Dense collocation system over [beta | u at non-Dirichlet nodes].

    Row layout: one boundary-condition row per boundary knot (value row for
    Dirichlet knots, flux row for Neumann knots), then one value-consistency
    row per non-Dirichlet node (Neumann boundary knots and interior knots),
    asserting u at the node equals the kernel layer plus u_p there.
    """
    if problem.is_nonlinear:
        raise ValueError("nonlinear problems use solve_nonlinear_boundary_only")
    n = knots.n_boundary
    l = knots.n_interior
    if n < 1:
        raise ValueError("need at least one boundary knot")
    mask = np.zeros(n, dtype=bool) if neumann_mask is None else np.asarray(neumann_mask, bool)
    if mask.shape != (n,):
        raise ValueError(f"neumann_mask must have one entry per boundary knot, got {mask.shape}")
    if mask.any() and problem.neumann is None:
        raise ValueError("neumann_mask set but the problem has no flux data b2")

    bpts = knots.boundary_points()
    nodes = knots.nodes()
    m = n + l

    # nodal index sets: Dirichlet values are data, the rest are unknowns
    known = np.flatnonzero(~mask)
    unknown = np.concatenate([np.flatnonzero(mask), np.arange(n, m)]).astype(int)
    u_known = _data_values(problem.dirichlet, bpts[known])

    if problem.needs_drm:
        sys_drm = DrmSystem(knots, problem.rbf_pair)
        alpha_lin, alpha_const = sys_drm.alpha_affine_map(
            problem.source_operator, problem.forcing)
        p_map = sys_drm.phi_matrix @ alpha_lin
        q_map = sys_drm.phi_matrix @ alpha_const
    else:
        sys_drm = None
        alpha_lin = alpha_const = None
        p_map = np.zeros((m, m))
        q_map = np.zeros(m)

    size = n + l + int(mask.sum())
    a = np.zeros((size, size))
    rhs = np.zeros(size)
    kb = _kernel_matrix(problem.kernel, nodes, bpts)
    n_unknown = len(unknown)
    col_of_node = {node: n + j for j, node in enumerate(unknown)}

    row = 0
    # boundary-condition rows
    for i in range(n):
        if mask[i]:
            normal = knots.boundary[i].normal
            if normal is None:
                raise ValueError(f"boundary knot {i} needs a normal for its flux row")
            a[row, :n] = _kernel_normal_rows(problem.kernel, bpts[i][None], [normal], bpts)[0]
            if sys_drm is not None:
                pn = sys_drm.basis_normal_rows(bpts[i][None], [normal]) @ alpha_lin
                qn = sys_drm.basis_normal_rows(bpts[i][None], [normal]) @ alpha_const
                a[row, n:] = pn[0, unknown]
                rhs[row] = problem.neumann(bpts[i, 0], bpts[i, 1]) \
                    - pn[0, known] @ u_known - qn[0]
            else:
                rhs[row] = problem.neumann(bpts[i, 0], bpts[i, 1])
        else:
            a[row, :n] = kb[i]
            a[row, n:] = p_map[i, unknown]
            rhs[row] = problem.dirichlet(bpts[i, 0], bpts[i, 1]) \
                - p_map[i, known] @ u_known - q_map[i]
        row += 1

    # value-consistency rows at every unknown node (flux knots and interior)
    for node in unknown:
        a[row, :n] = kb[node]
        a[row, n:] += p_map[node, unknown]
        a[row, col_of_node[node]] -= 1.0
        rhs[row] = -p_map[node, known] @ u_known - q_map[node]
        row += 1

    assert row == size and n + n_unknown == size
    return AssembledSystem(a, rhs, knots, mask, unknown, sys_drm,
                           (alpha_lin, alpha_const) if sys_drm is not None else None)


def solve_linear(problem: ProblemSpec, knots: KnotSet,
                 neumann_mask=None) -> BkmSolution:
    """Assemble, solve and package a linear problem."""
    system = assemble_linear(problem, knots, neumann_mask)
    solver = LuSolver(system.matrix)
    sol = solver.solve(system.rhs)
    n = knots.n_boundary
    beta = sol[:n]
    u_unknown = sol[n:]

    # reassemble the full nodal vector, then the DRM coefficients
    m = knots.n_nodes
    u_all = np.zeros(m)
    mask = system.neumann_mask
    bpts = knots.boundary_points()
    known = np.flatnonzero(~mask)
    u_all[known] = _data_values(problem.dirichlet, bpts[known])
    u_all[system.unknown_nodes] = u_unknown

    if system.alpha_map is not None:
        alpha_lin, alpha_const = system.alpha_map
        alpha = alpha_const + alpha_lin @ u_all
    else:
        alpha = None

    resid = np.linalg.norm(system.matrix @ sol - system.rhs)
    scale = (np.linalg.norm(system.matrix) * np.linalg.norm(sol)
             + np.linalg.norm(system.rhs))
    diagnostics = {
        "condition_collocation": solver.condition,
        "condition_interpolation": system.drm.condition if system.drm else None,
        "solve_residual": float(resid / scale) if scale > 0 else 0.0,
    }
    return BkmSolution(beta, alpha, u_all[n:], knots, problem.kernel,
                       system.drm, diagnostics)


def _boundary_data_derivative(b1, term: NonlinearTerm, x, y):
    """Central-difference derivative of the Dirichlet-data field."""
    if (term.dx, term.dy) == (1, 0):
        h = _FD_STEP_FIRST
        return (b1(x + h, y) - b1(x - h, y)) / (2.0 * h)
    if (term.dx, term.dy) == (0, 1):
        h = _FD_STEP_FIRST
        return (b1(x, y + h) - b1(x, y - h)) / (2.0 * h)
    if (term.dx, term.dy) == (2, 0):
        h = _FD_STEP_SECOND
        return (b1(x + h, y) - 2.0 * b1(x, y) + b1(x - h, y)) / (h * h)
    if (term.dx, term.dy) == (0, 2):
        h = _FD_STEP_SECOND
        return (b1(x, y + h) - 2.0 * b1(x, y) + b1(x, y - h)) / (h * h)
    if (term.dx, term.dy) == (1, 1):
        h = _FD_STEP_SECOND
        return (b1(x + h, y + h) - b1(x + h, y - h)
                - b1(x - h, y + h) + b1(x - h, y - h)) / (4.0 * h * h)
    raise ValueError(f"unsupported nonlinear derivative ({term.dx}, {term.dy})")


def solve_nonlinear_boundary_only(problem: ProblemSpec, knots: KnotSet) -> BkmSolution:
    """One-step direct solve of a nonlinear problem on boundary knots only.

    The source g = f + u - sum of nonlinear products is evaluated outright
    from the known boundary values, the particular layer follows from one
    factorization of the (bare, untailed) interpolation system, and the
    kernel layer from one factorization of the collocation matrix.  No
    iteration anywhere.
    """
    if not problem.is_nonlinear:
        raise ValueError("problem has no nonlinear terms; use solve_linear")
    if knots.n_interior != 0:
        raise ValueError("the direct path is boundary-only: interior knots would "
                         "make the algebraic system nonlinear")
    if problem.neumann is not None:
        raise ValueError("the direct path needs Dirichlet data at every knot")
    if problem.rbf_pair is None:
        raise ValueError("the direct path needs an rbf_pair")

    bpts = knots.boundary_points()
    x, y = bpts[:, 0], bpts[:, 1]
    u = _data_values(problem.dirichlet, bpts)

    # bare interpolation system: no polynomial tail on this path (the tail
    # biases the curvature reconstruction of boundary-sampled sources)
    sys_drm = DrmSystem(knots, problem.rbf_pair, poly_tail=False)

    if problem.nonlinear_derivative_source == "interpolant":
        lam = sys_drm.solve_alpha(u)

    g = u.copy()
    for term in problem.nonlinear_terms:
        if problem.nonlinear_derivative_source == "boundary_data":
            du = _boundary_data_derivative(problem.dirichlet, term, x, y)
            du = np.broadcast_to(np.asarray(du, dtype=float), u.shape).copy()
        else:
            op = OperatorSpec(terms=((term.dx, term.dy, 1.0),))
            du = sys_drm.operator_node_rows(op) @ lam
        g = g - (hadamard(du, u) if term.multiplies_u else du)
    if problem.forcing is not None:
        g = g + problem.forcing(x, y)

    alpha = sys_drm.solve_alpha(g)
    up_boundary = sys_drm.phi_matrix @ alpha

    collocation = _kernel_matrix(problem.kernel, bpts, bpts)
    solver = LuSolver(collocation)
    beta = solver.solve(u - up_boundary)

    diagnostics = {
        "condition_collocation": solver.condition,
        "condition_interpolation": sys_drm.condition,
        "solve_residual": float(np.linalg.norm(collocation @ beta - (u - up_boundary))
                                / max(np.linalg.norm(u - up_boundary), 1e-300)),
    }
    return BkmSolution(beta, alpha, np.zeros(0), knots, problem.kernel,
                       sys_drm, diagnostics)
