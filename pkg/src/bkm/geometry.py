"""Elliptical domains, knot placement and the radial chain-rule factor.

Knots are the only discretization entity: boundary knots carry an outward
unit normal, interior knots do not.  Placement is deterministic so that runs
are bit-reproducible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "EllipseDomain",
    "Knot",
    "KnotSet",
    "place_boundary_knots",
    "place_interior_knots",
    "make_knot_set",
    "dr_dn",
    "knots_to_csv",
    "knots_from_csv",
]

BOUNDARY = "boundary"
INTERIOR = "interior"

#: knots closer than this are considered coincident and rejected
MIN_SEPARATION = 1e-9

#: first interior ring (at half scale) holds at most this many knots before
#: the three-quarter-scale ring starts filling
RING_CAPACITY = 7


@dataclass(frozen=True)
class EllipseDomain:
    """Axis-aligned ellipse, the benchmark geometry.

    ``semi_major`` (a, along x) must be >= ``semi_minor`` (b, along y) > 0.
    """

    center: tuple = (0.0, 0.0)
    semi_major: float = 2.0
    semi_minor: float = 1.0

    def __post_init__(self):
        if not (self.semi_major >= self.semi_minor > 0):
            raise ValueError(
                f"require a >= b > 0, got a={self.semi_major}, b={self.semi_minor}")

    def implicit(self, points):
        """((x-x0)/a)^2 + ((y-y0)/b)^2 - 1; zero on the boundary."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        dx = (p[:, 0] - self.center[0]) / self.semi_major
        dy = (p[:, 1] - self.center[1]) / self.semi_minor
        return dx * dx + dy * dy - 1.0

    def contains(self, points, tol=0.0):
        return self.implicit(points) < -tol

    def boundary_point(self, t):
        """Point at parametric angle t."""
        t = np.asarray(t, dtype=float)
        return np.stack([self.center[0] + self.semi_major * np.cos(t),
                         self.center[1] + self.semi_minor * np.sin(t)], axis=-1)

    def outward_normal(self, t):
        """Unit outward normal at parametric angle t (gradient direction)."""
        t = np.asarray(t, dtype=float)
        n = np.stack([np.cos(t) / self.semi_major,
                      np.sin(t) / self.semi_minor], axis=-1)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)


@dataclass(frozen=True)
class Knot:
    """A collocation point; boundary knots carry a unit outward normal."""

    position: np.ndarray
    kind: str
    normal: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        if self.kind not in (BOUNDARY, INTERIOR):
            raise ValueError(f"knot kind must be 'boundary' or 'interior', got {self.kind!r}")
        if self.normal is not None:
            n = np.asarray(self.normal, dtype=float)
            if abs(np.linalg.norm(n) - 1.0) > 1e-9:
                raise ValueError("knot normal must have unit length")
            object.__setattr__(self, "normal", n)


class KnotSet:
    """Ordered boundary and interior knots with the pairwise-distinct check."""

    def __init__(self, boundary: Sequence[Knot], interior: Sequence[Knot] = ()):
        boundary = list(boundary)
        interior = list(interior)
        if any(k.kind != BOUNDARY for k in boundary):
            raise ValueError("boundary list contains a non-boundary knot")
        if any(k.kind != INTERIOR for k in interior):
            raise ValueError("interior list contains a non-interior knot")
        pts = np.array([k.position for k in boundary + interior], dtype=float).reshape(-1, 2)
        if len(pts) >= 2:
            d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
            np.fill_diagonal(d, np.inf)
            if d.min() <= MIN_SEPARATION:
                i, j = np.unravel_index(np.argmin(d), d.shape)
                raise ValueError(f"knots {i} and {j} coincide (separation {d.min():.2e})")
        self.boundary = boundary
        self.interior = interior

    @property
    def n_boundary(self) -> int:
        return len(self.boundary)

    @property
    def n_interior(self) -> int:
        return len(self.interior)

    @property
    def n_nodes(self) -> int:
        return len(self.boundary) + len(self.interior)

    def boundary_points(self) -> np.ndarray:
        return np.array([k.position for k in self.boundary], dtype=float).reshape(-1, 2)

    def interior_points(self) -> np.ndarray:
        return np.array([k.position for k in self.interior], dtype=float).reshape(-1, 2)

    def nodes(self) -> np.ndarray:
        """All knot positions, boundary first then interior."""
        return np.vstack([self.boundary_points(), self.interior_points()])

    def boundary_normals(self) -> np.ndarray:
        if any(k.normal is None for k in self.boundary):
            raise ValueError("this knot set has boundary knots without normals")
        return np.array([k.normal for k in self.boundary], dtype=float).reshape(-1, 2)


def place_boundary_knots(domain: EllipseDomain, n: int) -> list:
    """n knots at uniform parametric angles t_i = 2 pi i / n with outward normals."""
    if n < 1:
        raise ValueError(f"need at least one boundary knot, got {n}")
    t = 2.0 * np.pi * np.arange(n) / n
    pos = domain.boundary_point(t)
    nrm = domain.outward_normal(t)
    return [Knot(pos[i], BOUNDARY, nrm[i]) for i in range(n)]


def place_interior_knots(domain: EllipseDomain, l: int) -> list:
    """Deterministic interior fill: center knot, then concentric rings.

    The first ring sits on the half-scale ellipse and holds up to
    ``RING_CAPACITY`` knots; the remainder goes on the three-quarter-scale
    ellipse.  Each ring spreads its knots at uniform parametric angles
    starting from angle zero.
    """
    if l < 0:
        raise ValueError(f"interior knot count must be >= 0, got {l}")
    knots = []
    if l >= 1:
        knots.append(Knot(np.asarray(domain.center, dtype=float), INTERIOR))
    remaining = l - 1
    first = min(max(remaining, 0), RING_CAPACITY)
    second = max(remaining - first, 0)
    for count, scale in ((first, 0.5), (second, 0.75)):
        for k in range(count):
            t = 2.0 * np.pi * k / count
            pos = (domain.center[0] + scale * domain.semi_major * np.cos(t),
                   domain.center[1] + scale * domain.semi_minor * np.sin(t))
            knots.append(Knot(np.asarray(pos), INTERIOR))
    return knots


def make_knot_set(domain: EllipseDomain, n_boundary: int, n_interior: int = 0) -> KnotSet:
    return KnotSet(place_boundary_knots(domain, n_boundary),
                   place_interior_knots(domain, n_interior))


def dr_dn(x, x_k, n):
    """Directional chain-rule factor d|x - x_k| / dn = (x - x_k).n / |x - x_k|.

    Returns 0 at coincident points: every kernel derivative in the catalog
    vanishes there anyway, so the convention never leaks into results.
    """
    x = np.asarray(x, dtype=float)
    x_k = np.asarray(x_k, dtype=float)
    d = x - x_k
    r = np.linalg.norm(d)
    if r == 0.0:
        return 0.0
    # the quantity is a direction cosine; clamp away the drift that squared
    # norms of near-subnormal separations pick up
    return float(np.clip(np.dot(d, np.asarray(n, dtype=float)) / r, -1.0, 1.0))


# ---------------------------------------------------------------------------
# CSV interchange: header x,y,kind,nx,ny; normals blank on interior rows


def knots_to_csv(knot_set: KnotSet, path_or_buffer):
    """Write a knot set as CSV with header ``x,y,kind,nx,ny``."""
    own = isinstance(path_or_buffer, (str, bytes))
    fh = open(path_or_buffer, "w", newline="") if own else path_or_buffer
    try:
        w = csv.writer(fh)
        w.writerow(["x", "y", "kind", "nx", "ny"])
        for k in knot_set.boundary + knot_set.interior:
            nx, ny = ("", "") if k.normal is None else (
                repr(float(k.normal[0])), repr(float(k.normal[1])))
            w.writerow([repr(float(k.position[0])), repr(float(k.position[1])),
                        k.kind, nx, ny])
    finally:
        if own:
            fh.close()


def knots_from_csv(path_or_buffer) -> KnotSet:
    """Read a knot set written by :func:`knots_to_csv`."""
    own = isinstance(path_or_buffer, (str, bytes))
    fh = open(path_or_buffer, "r", newline="") if own else path_or_buffer
    try:
        rows = list(csv.reader(fh))
    finally:
        if own:
            fh.close()
    if not rows or [c.strip() for c in rows[0]] != ["x", "y", "kind", "nx", "ny"]:
        raise ValueError("knot CSV must start with header 'x,y,kind,nx,ny'")
    boundary, interior = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        x, y, kind, nx, ny = (c.strip() for c in row)
        if kind == BOUNDARY:
            if nx == "" or ny == "":
                raise ValueError(f"line {lineno}: boundary knot is missing its normal")
            boundary.append(Knot((float(x), float(y)), BOUNDARY, (float(nx), float(ny))))
        elif kind == INTERIOR:
            interior.append(Knot((float(x), float(y)), INTERIOR))
        else:
            raise ValueError(f"line {lineno}: unknown knot kind {kind!r}")
    return KnotSet(boundary, interior)
