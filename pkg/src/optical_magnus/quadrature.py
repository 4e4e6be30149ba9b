"""Tensor-product quadrature on the sphere and on polar caps.

Gauss-Legendre in ``cos(theta)`` times the uniform trapezoid rule in ``phi``.
On a cap ``theta <= theta_max`` the Legendre nodes are mapped affinely onto
``[cos(theta_max), 1]``, so integrands that are smooth inside the cap converge
spectrally even if they jump at its rim.

Sums are formed with :func:`math.fsum` in a fixed node order, which makes the
results correctly rounded and bit-reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import roots_legendre

MIN_NODES = 4
MAX_NODES = 2**14
# rows of theta nodes evaluated per integrand call in the adaptive driver
_CHUNK_POINTS = 2**20


class NoConvergence(RuntimeError):
    """Adaptive quadrature hit the node cap before reaching the tolerance."""


@dataclass(frozen=True)
class SphericalGrid:
    """Quadrature grid over the full sphere (``theta_max=None``) or a polar cap."""

    n_theta: int
    n_phi: int
    theta_max: float | None = None

    def __post_init__(self):
        if self.n_theta < MIN_NODES or self.n_phi < MIN_NODES:
            raise ValueError(
                f"grid needs at least {MIN_NODES} nodes per axis, "
                f"got n_theta={self.n_theta}, n_phi={self.n_phi}"
            )
        if self.theta_max is not None and not 0.0 < self.theta_max <= np.pi:
            raise ValueError(f"cap angle must lie in (0, pi], got {self.theta_max}")

    @property
    def cos_min(self) -> float:
        return -1.0 if self.theta_max is None else math.cos(self.theta_max)

    @property
    def solid_angle(self) -> float:
        return 2.0 * math.pi * (1.0 - self.cos_min)

    @cached_property
    def _nodes(self):
        x, w = roots_legendre(self.n_theta)
        half = 0.5 * (1.0 - self.cos_min)
        mu = half * x + (1.0 - half)
        theta = np.arccos(np.clip(mu, -1.0, 1.0))
        phi = 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi
        w_theta = half * w
        w_phi = np.full(self.n_phi, 2.0 * np.pi / self.n_phi)
        return theta, phi, w_theta, w_phi

    @property
    def theta(self) -> np.ndarray:
        """Polar nodes, shape ``(n_theta,)``."""
        return self._nodes[0]

    @property
    def phi(self) -> np.ndarray:
        return self._nodes[1]

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Node angles broadcast to shape ``(n_theta, n_phi)``."""
        return np.meshgrid(self.theta, self.phi, indexing="ij")

    @property
    def weights(self) -> np.ndarray:
        """Solid-angle weights, shape ``(n_theta, n_phi)``; all positive."""
        return np.outer(self._nodes[2], self._nodes[3])

    def refined(self) -> "SphericalGrid":
        return SphericalGrid(2 * self.n_theta, 2 * self.n_phi, self.theta_max)


def _fsum(a: np.ndarray) -> float | complex:
    a = np.ravel(a)
    if np.iscomplexobj(a):
        return complex(math.fsum(a.real), math.fsum(a.imag))
    return math.fsum(a)


def _weighted_sums(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Correctly rounded ``sum(w * f)`` over the two leading grid axes."""
    values = np.asarray(values)
    prod = values * weights.reshape(weights.shape + (1,) * (values.ndim - 2))
    tail = prod.shape[2:]
    flat = prod.reshape(prod.shape[0] * prod.shape[1], -1)
    out = np.array([_fsum(flat[:, j]) for j in range(flat.shape[1])])
    return out.reshape(tail)


def _evaluate(f, grid: SphericalGrid) -> np.ndarray:
    """Integral of ``f`` over ``grid`` with trailing-axis output preserved."""
    theta, phi = grid.mesh()
    w = grid.weights
    rows = max(1, _CHUNK_POINTS // grid.n_phi)
    if grid.n_theta <= rows:
        return _weighted_sums(f(theta, phi), w)
    partial = [
        _weighted_sums(f(theta[i : i + rows], phi[i : i + rows]), w[i : i + rows])
        for i in range(0, grid.n_theta, rows)
    ]
    stacked = np.stack(partial)
    flat = stacked.reshape(len(partial), -1)
    return np.array([_fsum(flat[:, j]) for j in range(flat.shape[1])]).reshape(stacked.shape[1:])


def integrate(f, grid: SphericalGrid) -> complex:
    """Integrate a scalar function ``f(theta, phi)`` over the grid domain.

    ``f`` receives arrays of node angles of shape ``(n_theta, n_phi)`` and must
    return an array of the same shape. The result is a Python ``complex``.
    """
    return complex(_evaluate(f, grid))


def integrate_vec3(f, grid: SphericalGrid) -> np.ndarray:
    """Componentwise integral of a vector field returning shape ``(..., 3)``."""
    out = _evaluate(f, grid)
    if out.shape != (3,):
        raise ValueError(f"integrand must return 3-vectors, got trailing shape {out.shape}")
    return out


def integrate_many(f, grid: SphericalGrid) -> np.ndarray:
    """Integral of an integrand with arbitrary trailing output shape."""
    return _evaluate(f, grid)


def integrate_adaptive(
    f,
    theta_max: float | None,
    rel_tol: float,
    n_start: int = 16,
    max_nodes: int = MAX_NODES,
):
    """Integrate by doubling both node counts until successive estimates agree.

    The relative change is measured on the Euclidean norm over all output
    components, so a vanishing component does not stall convergence as long
    as another one sets the scale.

    Returns
    -------
    value : ndarray or complex
        Final estimate (shape of the integrand's trailing axes).
    achieved_tol : float
        Relative change between the last two estimates.
    grid : SphericalGrid
        The grid that produced ``value``.
    """
    if not rel_tol > 0:
        raise ValueError("rel_tol must be positive")
    n = max(MIN_NODES, n_start)
    if n > max_nodes:
        raise NoConvergence(f"starting grid {n} already exceeds the node cap {max_nodes}")
    grid = SphericalGrid(n, n, theta_max)
    prev = _evaluate(f, grid)
    while True:
        if 2 * grid.n_theta > max_nodes:
            raise NoConvergence(
                f"no convergence to rel_tol={rel_tol:g} within {max_nodes} nodes per axis"
            )
        grid = grid.refined()
        cur = _evaluate(f, grid)
        scale = float(np.linalg.norm(cur))
        diff = float(np.linalg.norm(cur - prev))
        achieved = diff / scale if scale > 0 else diff
        if achieved < rel_tol:
            value = complex(cur) if cur.shape == () else cur
            return value, achieved, grid
        prev = cur
