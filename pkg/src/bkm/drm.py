"""Dual-reciprocity machinery: radial interpolation and particular solutions.

An inhomogeneous source g is interpolated over all knots in the paired basis
phi (optionally augmented with the linear polynomial tail [x, y, 1] and its
moment side conditions); swapping each basis function for its particular
profile phi_p then yields a field u_p with (Laplacian + identity) u_p equal to
the interpolant of g.  Because the source of interest has the form
g = f + S{u} with S a linear operator acting on the (partly unknown) nodal
values u, the whole pipeline is exposed as an affine map u_p = P u + q that
the collocation solver can substitute directly.

The polynomial tail reproduces constants and linear fields exactly; its
"particular solutions" are the polynomials themselves, since their Laplacian
vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from .geometry import KnotSet
from .kernels import ParticularPair
from .linalg import LuSolver

__all__ = ["OperatorTerm", "OperatorSpec", "IDENTITY_OP", "DrmSystem", "build_drm"]

_SUPPORTED_DERIVATIVES = {(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1)}


@dataclass(frozen=True)
class OperatorTerm:
    """One term c(x, y) * d^{dx+dy} / dx^dx dy^dy of a linear operator."""

    dx: int
    dy: int
    coeff: Union[float, Callable] = 1.0

    def __post_init__(self):
        if (self.dx, self.dy) not in _SUPPORTED_DERIVATIVES:
            raise ValueError(
                f"unsupported derivative order ({self.dx}, {self.dy}); "
                "terms up to total order 2 are available")

    def coeff_at(self, points) -> np.ndarray:
        points = np.atleast_2d(points)
        if callable(self.coeff):
            return np.asarray(self.coeff(points[:, 0], points[:, 1]), dtype=float)
        return np.full(len(points), float(self.coeff))


@dataclass(frozen=True)
class OperatorSpec:
    """A linear differential operator as a sum of coefficient-weighted terms."""

    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(
            t if isinstance(t, OperatorTerm) else OperatorTerm(*t) for t in self.terms))

    @staticmethod
    def identity() -> "OperatorSpec":
        return OperatorSpec(terms=(OperatorTerm(0, 0, 1.0),))


IDENTITY_OP = OperatorSpec.identity()


class DrmSystem:
    """Interpolation system over a knot set in a paired radial basis.

    ``poly_tail`` selects the augmented form (default): the matrix gains the
    three tail columns/rows and the zero corner block, and interpolants
    reproduce linear polynomials exactly.  The bare form (no tail) is used by
    the boundary-only direct path, where augmentation measurably degrades the
    reconstruction of curved sources from a handful of boundary samples.
    """

    def __init__(self, knots: KnotSet, pair: ParticularPair, poly_tail: bool = True):
        self.knots = knots
        self.pair = pair
        self.poly_tail = bool(poly_tail)
        self.nodes = knots.nodes()
        self.n_nodes = len(self.nodes)
        if self.n_nodes < 1:
            raise ValueError("DRM needs at least one knot")
        self.size = self.n_nodes + (3 if self.poly_tail else 0)

        # phi on the symmetric distance matrix; both triangles come from the
        # same pdist evaluation, so A == A.T holds exactly.
        r = squareform(pdist(self.nodes)) if self.n_nodes > 1 else np.zeros((1, 1))
        self._r_nodes = r
        a = np.zeros((self.size, self.size))
        a[:self.n_nodes, :self.n_nodes] = pair.rbf(r)
        if self.poly_tail:
            tail = self._tail(self.nodes)
            a[:self.n_nodes, self.n_nodes:] = tail
            a[self.n_nodes:, :self.n_nodes] = tail.T
        self.matrix = a
        self.solver = LuSolver(a)
        self.condition = self.solver.condition
        self.phi_matrix = self.basis_rows(self.nodes)

    # -- assembly helpers ---------------------------------------------------

    @staticmethod
    def _tail(points) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.column_stack([points[:, 0], points[:, 1], np.ones(len(points))])

    def pad(self, values) -> np.ndarray:
        """Append the tail zeros of the side conditions to a nodal vector."""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.n_nodes,):
            raise ValueError(f"expected {self.n_nodes} nodal values, got shape {values.shape}")
        if not self.poly_tail:
            return values.copy()
        return np.concatenate([values, np.zeros(3)])

    def basis_rows(self, points) -> np.ndarray:
        """Rows of particular-solution evaluations phi_p(|x - x_j|) (+ tail)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        rows = self.pair.particular(cdist(points, self.nodes))
        if self.poly_tail:
            rows = np.hstack([rows, self._tail(points)])
        return rows

    def basis_normal_rows(self, points, normals) -> np.ndarray:
        """Rows of d phi_p / dn at ``points`` with unit normals ``normals``."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        r = cdist(points, self.nodes)
        dx = points[:, 0][:, None] - self.nodes[:, 0][None, :]
        dy = points[:, 1][:, None] - self.nodes[:, 1][None, :]
        rs = np.where(r > 0, r, 1.0)
        # d/dn phi_p(r) = phi_p'(r) (d.n)/r, zero at coincident points
        dot = dx * normals[:, 0][:, None] + dy * normals[:, 1][:, None]
        rows = np.where(r > 0, self.pair.particular_d1(rs) * dot / rs, 0.0)
        if self.poly_tail:
            tail = np.column_stack([normals[:, 0], normals[:, 1], np.zeros(len(points))])
            rows = np.hstack([rows, tail])
        return rows

    def _derivative_block(self, dx_order: int, dy_order: int) -> np.ndarray:
        """Node-by-node matrix of d^(a) phi(|x - x_j|) / dx^a at the nodes."""
        pair = self.pair
        r = self._r_nodes
        if (dx_order, dy_order) == (0, 0):
            return pair.rbf(r)
        if pair.rbf_d1 is None or pair.rbf_d2 is None:
            raise ValueError("this pair carries no closed-form derivatives")
        if not pair.smooth_at_origin:
            raise ValueError(
                "derivative operators need a basis smooth at r = 0 (MQ or TPS pair); "
                "the cubic pair has a cone point there")
        dx = self.nodes[:, 0][:, None] - self.nodes[:, 0][None, :]
        dy = self.nodes[:, 1][:, None] - self.nodes[:, 1][None, :]
        rs = np.where(r > 0, r, 1.0)
        d1 = pair.rbf_d1(rs)
        if (dx_order, dy_order) == (1, 0):
            return np.where(r > 0, d1 * dx / rs, 0.0)
        if (dx_order, dy_order) == (0, 1):
            return np.where(r > 0, d1 * dy / rs, 0.0)
        d2 = pair.rbf_d2(rs)
        origin = self.pair.rbf_d2_origin()
        if (dx_order, dy_order) == (2, 0):
            return np.where(r > 0, d2 * dx ** 2 / rs ** 2 + d1 * dy ** 2 / rs ** 3, origin)
        if (dx_order, dy_order) == (0, 2):
            return np.where(r > 0, d2 * dy ** 2 / rs ** 2 + d1 * dx ** 2 / rs ** 3, origin)
        # mixed: dx dy (phi''/r^2 - phi'/r^3), limit 0
        return np.where(r > 0, dx * dy * (d2 - d1 / rs) / rs ** 2, 0.0)

    @staticmethod
    def _tail_derivative(dx_order: int, dy_order: int) -> np.ndarray:
        if (dx_order, dy_order) == (0, 0):
            return None  # caller uses the tail values themselves
        t = np.zeros(3)
        if (dx_order, dy_order) == (1, 0):
            t[0] = 1.0
        elif (dx_order, dy_order) == (0, 1):
            t[1] = 1.0
        return t

    def operator_node_rows(self, op: OperatorSpec) -> np.ndarray:
        """Node rows of op applied to every basis function (and tail column)."""
        out = np.zeros((self.n_nodes, self.size))
        for term in op.terms:
            coeff = term.coeff_at(self.nodes)[:, None]
            block = np.zeros((self.n_nodes, self.size))
            block[:, :self.n_nodes] = self._derivative_block(term.dx, term.dy)
            if self.poly_tail:
                if (term.dx, term.dy) == (0, 0):
                    block[:, self.n_nodes:] = self._tail(self.nodes)
                else:
                    block[:, self.n_nodes:] = self._tail_derivative(term.dx, term.dy)
            out += coeff * block
        return out

    def operator_matrix(self, op: OperatorSpec) -> np.ndarray:
        """op applied to the full system: node rows transformed, side-condition
        rows carried over unchanged (they constrain coefficients, not values)."""
        m = np.zeros((self.size, self.size))
        m[:self.n_nodes] = self.operator_node_rows(op)
        if self.poly_tail:
            m[self.n_nodes:] = self.matrix[self.n_nodes:]
        return m

    # -- operations ----------------------------------------------------------

    def solve_alpha(self, values) -> np.ndarray:
        """Interpolation coefficients for nodal data (side conditions appended)."""
        return self.solver.solve(self.pad(values))

    def apply_operator(self, op: OperatorSpec, values) -> np.ndarray:
        """op{interpolant of values} evaluated at the nodes."""
        return self.operator_node_rows(op) @ self.solve_alpha(values)

    def alpha_affine_map(self, source_op: Optional[OperatorSpec], forcing):
        """Coefficients of the particular solution as an affine map of u.

        For the source g = f + S{u} the interpolation coefficients are
        alpha(u) = alpha_const + alpha_lin @ u with

            alpha_const = A^-1 [f; 0]
            alpha_lin   = A^-1 S{A} A^-1 E,

        E the padding injection of nodal values.  ``forcing`` is either None,
        a callable of (x, y) or a length-n_nodes vector.
        """
        fpad = np.zeros(self.size)
        if forcing is not None:
            if callable(forcing):
                fpad[:self.n_nodes] = forcing(self.nodes[:, 0], self.nodes[:, 1])
            else:
                fpad[:self.n_nodes] = np.asarray(forcing, dtype=float)
        alpha_const = self.solver.solve(fpad)
        if source_op is None or not source_op.terms:
            alpha_lin = np.zeros((self.size, self.n_nodes))
        else:
            e = np.zeros((self.size, self.n_nodes))
            e[:self.n_nodes] = np.eye(self.n_nodes)
            inner = self.solver.solve(e)
            alpha_lin = self.solver.solve(self.operator_matrix(source_op) @ inner)
        return alpha_lin, alpha_const

    def particular_affine_map(self, source_op: Optional[OperatorSpec], forcing):
        """(P, q) with u_p at the nodes equal to P u + q for any nodal u."""
        alpha_lin, alpha_const = self.alpha_affine_map(source_op, forcing)
        return self.phi_matrix @ alpha_lin, self.phi_matrix @ alpha_const

    def evaluate_up(self, alpha, points) -> np.ndarray:
        """Particular solution sum_j alpha_j phi_p(|x - x_j|) (+ tail terms)."""
        alpha = np.asarray(alpha, dtype=float)
        if alpha.shape != (self.size,):
            raise ValueError(f"expected {self.size} coefficients, got shape {alpha.shape}")
        points = np.asarray(points, dtype=float)
        scalar = points.ndim == 1
        out = self.basis_rows(np.atleast_2d(points)) @ alpha
        return float(out[0]) if scalar else out


def build_drm(knots: KnotSet, pair: ParticularPair, poly_tail: bool = True) -> DrmSystem:
    """Assemble and factorize the interpolation system for a knot set."""
    return DrmSystem(knots, pair, poly_tail=poly_tail)
