"""Meshless boundary-only PDE solver built on boundary-knot collocation.

Nonsingular kernel translates centered on boundary knots carry the
homogeneous layer; a dual-reciprocity radial interpolation carries the
inhomogeneous layer.  No mesh, no integration, dense direct solves.
"""

from .drm import IDENTITY_OP, DrmSystem, OperatorSpec, OperatorTerm, build_drm
from .estimator import BoundaryKnotSolver
from .geometry import (EllipseDomain, Knot, KnotSet, dr_dn, knots_from_csv,
                       knots_to_csv, make_knot_set, place_boundary_knots,
                       place_interior_knots)
from .gensol import (Biharmonic2D, Biharmonic3D, ConvectionDiffusion2D,
                     Helmholtz2D, Helmholtz3D, ModifiedHelmholtz2D,
                     ModifiedHelmholtz3D, TransientDiffusion2D, TransientWave2D,
                     kernel_eval, kernel_normal_derivative, pde_residual)
from .kernels import (BesselSpec, ParticularPair, RbfKind, bessel_eval,
                      bessel_i0, bessel_i1, bessel_j0, bessel_j1, linear_pair,
                      mq_pair, pair_for, pair_from_particular, particular_eval,
                      rbf_eval, tps_pair)
from .linalg import LuSolver, SingularMatrixError, solve_dense
from .solver import (BkmSolution, NonlinearTerm, ProblemSpec, assemble_linear,
                     evaluate, hadamard, solve_linear,
                     solve_nonlinear_boundary_only)
from .cases import BenchmarkCase, CaseReport, builtin, case_names, run_case

__version__ = "0.1.0"

__all__ = [
    "BoundaryKnotSolver",
    "EllipseDomain", "Knot", "KnotSet", "make_knot_set",
    "place_boundary_knots", "place_interior_knots", "dr_dn",
    "knots_to_csv", "knots_from_csv",
    "BesselSpec", "bessel_eval", "bessel_j0", "bessel_j1", "bessel_i0", "bessel_i1",
    "RbfKind", "rbf_eval", "ParticularPair", "particular_eval",
    "linear_pair", "mq_pair", "tps_pair", "pair_for", "pair_from_particular",
    "OperatorSpec", "OperatorTerm", "IDENTITY_OP", "DrmSystem", "build_drm",
    "Helmholtz2D", "ModifiedHelmholtz2D", "Helmholtz3D", "ModifiedHelmholtz3D",
    "Biharmonic2D", "Biharmonic3D", "ConvectionDiffusion2D",
    "TransientDiffusion2D", "TransientWave2D",
    "kernel_eval", "kernel_normal_derivative", "pde_residual",
    "LuSolver", "SingularMatrixError", "solve_dense",
    "ProblemSpec", "NonlinearTerm", "BkmSolution", "hadamard",
    "assemble_linear", "solve_linear", "solve_nonlinear_boundary_only", "evaluate",
    "BenchmarkCase", "CaseReport", "builtin", "case_names", "run_case",
    "__version__",
]
