"""Catalog of nonsingular general-solution kernels.

Every entry solves its governing equation everywhere, including at zero
separation, which is what lets collocation place source and response points
on the same physical boundary: there is no singular diagonal to dodge.  The
wide-field (J0-type) kernels also come with closed-form normal derivatives
for flux boundary conditions.

Each kernel knows its own governing equation through ``residual_terms`` /
``is_time_dependent`` so the finite-difference self-check can verify the
catalog without per-kernel test code.  Two entries need a documented
convention choice:

* ``ConvectionDiffusion2D`` is kept exactly in its published closed form
  exp(-v.(x - x_k) / 2D) J0(mu r) / (2 pi D) with
  mu^2 = (|v|/2D)^2 + k/D.  Substituting that form into the advection
  equation shows it solves D lap(u) + v.grad(u) + k_eff u = 0 with
  k_eff = k + |v|^2 / (2D), not reaction coefficient k itself; the residual
  check therefore runs against k_eff (for v = 0 the two coincide and the
  kernel solves the plain equation).
* ``Biharmonic2D``/``Biharmonic3D`` solve lap(lap(w)) = lam^4 w: applying the
  Laplacian twice to J0(lam r) scales it by lam^4, so the quartic power is
  the consistent normalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import dr_dn
from .kernels import bessel_i0, bessel_i1, bessel_j0, bessel_j1

__all__ = [
    "GeneralSolutionKernel",
    "Helmholtz2D",
    "ModifiedHelmholtz2D",
    "Helmholtz3D",
    "ModifiedHelmholtz3D",
    "Biharmonic2D",
    "Biharmonic3D",
    "ConvectionDiffusion2D",
    "TransientDiffusion2D",
    "TransientWave2D",
    "kernel_eval",
    "kernel_normal_derivative",
    "pde_residual",
]


def _separation(x, x_k):
    x = np.asarray(x, dtype=float)
    x_k = np.asarray(x_k, dtype=float)
    return x - x_k, float(np.linalg.norm(x - x_k))


def _sinc_like(fn, lam, r):
    # fn(lam r) / r with the limit lam at r = 0 hard-coded, not thresholded
    if r == 0.0:
        return lam
    return fn(lam * r) / r


class GeneralSolutionKernel:
    """Base: a nonsingular solution of a fixed linear PDE, radial up to an
    optional drift factor, evaluated between a response point and a source
    knot."""

    dimension = 2
    is_time_dependent = False

    def evaluate(self, x, x_k, t: Optional[float] = None) -> float:
        raise NotImplementedError

    def radial_profile(self, r: float) -> float:
        """Value as a function of separation distance (radial kernels only)."""
        raise NotImplementedError

    def normal_derivative(self, x, x_k, n) -> float:
        raise ValueError(f"{type(self).__name__} has no boundary-flux rule")

    def _check_time(self, t):
        if self.is_time_dependent and t is None:
            raise ValueError(f"{type(self).__name__} needs a time argument")
        if not self.is_time_dependent and t is not None:
            raise ValueError(f"{type(self).__name__} is stationary; drop the time argument")


@dataclass(frozen=True)
class Helmholtz2D(GeneralSolutionKernel):
    """J0(lam r): solves lap(u) + lam^2 u = 0 in the plane."""

    wavenumber: float = 1.0

    def __post_init__(self):
        if not self.wavenumber > 0:
            raise ValueError("wavenumber must be positive")

    def radial_profile(self, r):
        return bessel_j0(self.wavenumber * np.asarray(r, dtype=float))

    def evaluate(self, x, x_k, t=None):
        self._check_time(t)
        _, r = _separation(x, x_k)
        return float(self.radial_profile(r))

    def normal_derivative(self, x, x_k, n):
        _, r = _separation(x, x_k)
        if r == 0.0:
            return 0.0  # J1(0) = 0 anyway
        lam = self.wavenumber
        return -lam * float(bessel_j1(lam * r)) * dr_dn(x, x_k, n)

    def radial_derivative(self, r):
        lam = self.wavenumber
        return -lam * bessel_j1(lam * np.asarray(r, dtype=float))


@dataclass(frozen=True)
class ModifiedHelmholtz2D(GeneralSolutionKernel):
    """I0(lam r): solves lap(u) - lam^2 u = 0 in the plane."""

    wavenumber: float = 1.0

    def __post_init__(self):
        if not self.wavenumber > 0:
            raise ValueError("wavenumber must be positive")

    def radial_profile(self, r):
        return bessel_i0(self.wavenumber * np.asarray(r, dtype=float))

    def evaluate(self, x, x_k, t=None):
        self._check_time(t)
        _, r = _separation(x, x_k)
        return float(self.radial_profile(r))

    def normal_derivative(self, x, x_k, n):
        _, r = _separation(x, x_k)
        if r == 0.0:
            return 0.0
        lam = self.wavenumber
        return lam * float(bessel_i1(lam * r)) * dr_dn(x, x_k, n)

    def radial_derivative(self, r):
        lam = self.wavenumber
        return lam * bessel_i1(lam * np.asarray(r, dtype=float))


@dataclass(frozen=True)
class Helmholtz3D(GeneralSolutionKernel):
    """sin(lam r)/r: solves the 3D equation lap(u) + lam^2 u = 0."""

    wavenumber: float = 1.0
    dimension = 3

    def evaluate(self, x, x_k, t=None):
        self._check_time(t)
        _, r = _separation(x, x_k)
        return _sinc_like(np.sin, self.wavenumber, r)


@dataclass(frozen=True)
class ModifiedHelmholtz3D(GeneralSolutionKernel):
    """sinh(lam r)/r: solves the 3D equation lap(u) - lam^2 u = 0."""

    wavenumber: float = 1.0
    dimension = 3

    def evaluate(self, x, x_k, t=None):
        self._check_time(t)
        _, r = _separation(x, x_k)
        return _sinc_like(np.sinh, self.wavenumber, r)


@dataclass(frozen=True)
class Biharmonic2D(GeneralSolutionKernel):
    """c1 J0(lam r) + c2 I0(lam r): solves lap(lap(w)) - lam^4 w = 0."""

    wavenumber: float = 1.0
    c1: float = 1.0
    c2: float = 1.0

    def evaluate(self, x, x_k, t=None):
        self._check_time(t)
        _, r = _separation(x, x_k)
        lam = self.wavenumber
        return self.c1 * float(bessel_j0(lam * r)) + self.c2 * float(bessel_i0(lam * r))

    def laplacian(self, x, x_k):
        """Closed-form lap of the kernel (used by the quartic residual check)."""
        _, r = _separation(x, x_k)
        lam = self.wavenumber
        return lam ** 2 * (-self.c1 * float(bessel_j0(lam * r))
                           + self.c2 * float(bessel_i0(lam * r)))


@dataclass(frozen=True)
class Biharmonic3D(GeneralSolutionKernel):
    """c0 sin(lam r)/r + c1 sinh(lam r)/r: 3D quartic analogue."""

    wavenumber: float = 1.0
    c0: float = 1.0
    c1: float = 1.0
    dimension = 3

    def evaluate(self, x, x_k, t=None):
        self._check_time(t)
        _, r = _separation(x, x_k)
        lam = self.wavenumber
        return self.c0 * _sinc_like(np.sin, lam, r) + self.c1 * _sinc_like(np.sinh, lam, r)

    def laplacian(self, x, x_k):
        _, r = _separation(x, x_k)
        lam = self.wavenumber
        return lam ** 2 * (-self.c0 * _sinc_like(np.sin, lam, r)
                           + self.c1 * _sinc_like(np.sinh, lam, r))


@dataclass(frozen=True)
class ConvectionDiffusion2D(GeneralSolutionKernel):
    """Drifted Bessel kernel for steady advection-diffusion-reaction.

    exp(-v.(x - x_k)/(2 D)) J0(mu r) / (2 pi D) with
    mu = sqrt((|v|/2D)^2 + k/D).  See the module docstring for the reaction
    coefficient this form actually annihilates.
    """

    diffusivity: float = 1.0
    velocity: tuple = (0.0, 0.0)
    reaction: float = 1.0

    def __post_init__(self):
        if not self.diffusivity > 0:
            raise ValueError("diffusivity must be positive")
        if self.mu_squared() <= 0:
            raise ValueError("require (|v|/2D)^2 + k/D > 0 for an oscillatory kernel")

    def mu_squared(self) -> float:
        d = self.diffusivity
        v2 = self.velocity[0] ** 2 + self.velocity[1] ** 2
        return v2 / (4.0 * d * d) + self.reaction / d

    def effective_reaction(self) -> float:
        """Reaction coefficient of the equation the printed form solves."""
        v2 = self.velocity[0] ** 2 + self.velocity[1] ** 2
        return self.reaction + v2 / (2.0 * self.diffusivity)

    def evaluate(self, x, x_k, t=None):
        self._check_time(t)
        d, r = _separation(x, x_k)
        rn = float(np.linalg.norm(d))
        drift = float(np.dot(np.asarray(self.velocity, dtype=float), d))
        mu = np.sqrt(self.mu_squared())
        return (np.exp(-drift / (2.0 * self.diffusivity)) * float(bessel_j0(mu * rn))
                / (2.0 * np.pi * self.diffusivity))


@dataclass(frozen=True)
class TransientDiffusion2D(GeneralSolutionKernel):
    """exp(-k t) J0(r): separated solution of lap(u) = u_t / k."""

    diffusivity: float = 1.0
    is_time_dependent = True

    def evaluate(self, x, x_k, t=None):
        self._check_time(t)
        _, r = _separation(x, x_k)
        return float(np.exp(-self.diffusivity * t) * bessel_j0(r))


@dataclass(frozen=True)
class TransientWave2D(GeneralSolutionKernel):
    """[A cos(c t) + B sin(c t)] J0(r): separated solution of lap(u) = u_tt / c^2."""

    speed: float = 1.0
    amp_cos: float = 1.0
    amp_sin: float = 0.0
    is_time_dependent = True

    def evaluate(self, x, x_k, t=None):
        self._check_time(t)
        _, r = _separation(x, x_k)
        c = self.speed
        return float((self.amp_cos * np.cos(c * t) + self.amp_sin * np.sin(c * t))
                     * bessel_j0(r))


def kernel_eval(kernel: GeneralSolutionKernel, x, x_k, t: Optional[float] = None) -> float:
    """Evaluate a catalog kernel between response point x and source knot x_k."""
    return kernel.evaluate(x, x_k, t)


def kernel_normal_derivative(kernel: GeneralSolutionKernel, x, x_k, n) -> float:
    """Boundary-flux rule d(kernel)/dn; wide-field 2D stationary kernels only."""
    return kernel.normal_derivative(x, x_k, n)


# ---------------------------------------------------------------------------
# Finite-difference self-verification


def _fd_laplacian(f, x, h):
    x = np.asarray(x, dtype=float)
    total = -2.0 * len(x) * f(x)
    for axis in range(len(x)):
        e = np.zeros_like(x)
        e[axis] = h
        total += f(x + e) + f(x - e)
    return total / (h * h)


def pde_residual(kernel: GeneralSolutionKernel, sample_points, t_samples=None,
                 h: float = 1e-4) -> float:
    """Max finite-difference residual of the kernel's governing equation.

    The residual is normalized by the largest kernel magnitude over the
    samples.  Sample points must avoid zero separation (the stencil needs
    room); the source knot sits at the origin.
    """
    x_k = np.zeros(kernel.dimension)
    points = [np.asarray(p, dtype=float) for p in sample_points]
    times = list(t_samples) if t_samples is not None else [None]
    worst = 0.0
    scale = 0.0

    for t in times:
        for p in points:
            val = kernel.evaluate(p, x_k, t)
            scale = max(scale, abs(val))
            if isinstance(kernel, Helmholtz2D):
                res = _fd_laplacian(lambda q: kernel.evaluate(q, x_k), p, h)
                res += kernel.wavenumber ** 2 * val
            elif isinstance(kernel, ModifiedHelmholtz2D):
                res = _fd_laplacian(lambda q: kernel.evaluate(q, x_k), p, h)
                res -= kernel.wavenumber ** 2 * val
            elif isinstance(kernel, Helmholtz3D):
                res = _fd_laplacian(lambda q: kernel.evaluate(q, x_k), p, h)
                res += kernel.wavenumber ** 2 * val
            elif isinstance(kernel, ModifiedHelmholtz3D):
                res = _fd_laplacian(lambda q: kernel.evaluate(q, x_k), p, h)
                res -= kernel.wavenumber ** 2 * val
            elif isinstance(kernel, (Biharmonic2D, Biharmonic3D)):
                # lap(lap w) = lam^4 w, with the inner Laplacian in closed form
                res = _fd_laplacian(lambda q: kernel.laplacian(q, x_k), p, h)
                res -= kernel.wavenumber ** 4 * val
            elif isinstance(kernel, ConvectionDiffusion2D):
                d = kernel.diffusivity
                res = d * _fd_laplacian(lambda q: kernel.evaluate(q, x_k), p, h)
                for axis, v_i in enumerate(kernel.velocity):
                    e = np.zeros_like(p)
                    e[axis] = h
                    res += v_i * (kernel.evaluate(p + e, x_k)
                                  - kernel.evaluate(p - e, x_k)) / (2 * h)
                res += kernel.effective_reaction() * val
            elif isinstance(kernel, TransientDiffusion2D):
                res = _fd_laplacian(lambda q: kernel.evaluate(q, x_k, t), p, h)
                dudt = (kernel.evaluate(p, x_k, t + h) - kernel.evaluate(p, x_k, t - h)) / (2 * h)
                res -= dudt / kernel.diffusivity
            elif isinstance(kernel, TransientWave2D):
                res = _fd_laplacian(lambda q: kernel.evaluate(q, x_k, t), p, h)
                utt = (kernel.evaluate(p, x_k, t + h) - 2.0 * val
                       + kernel.evaluate(p, x_k, t - h)) / (h * h)
                res -= utt / kernel.speed ** 2
            else:
                raise ValueError(f"no residual rule for {type(kernel).__name__}")
            worst = max(worst, abs(res))

    return worst / scale if scale > 0 else worst
