"""Angular-spectrum fields of the incident beam and the induced circular dipole.

All quantities are dimensionless: lengths in units of 1/k, detunings in units
of the transition half-linewidth gamma, amplitudes relative to an arbitrary
reference with Z0 = 1.

Field functions are vectorized over ``theta`` and ``phi`` (broadcast
together) and return arrays with a trailing axis of length 3.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# Prefactor of the dipole far field in its angular-spectrum form. The ``i``
# comes from writing the diverging spherical wave as a plane-wave spectrum and
# is what makes a resonant beam attenuated on axis. Module-level so the
# self-check can flip it as a mutation test.
SCATTER_PREFACTOR = 1j


class Direction(NamedTuple):
    """A point on the unit sphere (polar angle, azimuth), radians."""

    theta: float
    phi: float

    def unit_vector(self) -> np.ndarray:
        return unit_vector(self.theta, self.phi)


def unit_vector(theta, phi) -> np.ndarray:
    """Propagation direction ``u = (sin t cos p, sin t sin p, cos t)``."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def polarization_vector(theta, phi) -> np.ndarray:
    """x-polarization co-rotated with the rotation that takes z onto ``u``.

    The rotation is by ``theta`` about ``z x u``, so the result is a real unit
    vector transverse to ``unit_vector(theta, phi)``.
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    return np.stack([ct * cp**2 + sp**2, (ct - 1.0) * sp * cp, -st * cp], axis=-1)


def spherical_unit(sigma: int) -> np.ndarray:
    """Rotating-dipole unit vector ``(x -/+ i z)/sqrt(2)`` for ``sigma = +/-1``."""
    if sigma not in (1, -1):
        raise ValueError(f"handedness must be +1 or -1, got {sigma!r}")
    return np.array([1.0, 0.0, -1j * sigma]) / np.sqrt(2.0)


@dataclass(frozen=True)
class Gaussian:
    """Gaussian angular profile, ``exp(-theta**2 / w_theta**2)`` in field."""

    w_theta: float

    def __post_init__(self):
        if not 0.0 < self.w_theta < np.pi / 2:
            raise ValueError(f"w_theta must lie in (0, pi/2), got {self.w_theta}")

    @property
    def width(self) -> float:
        return self.w_theta

    @property
    def support(self) -> float:
        # the angular spectrum is a half-space object
        return np.pi / 2

    def profile(self, theta):
        theta = np.asarray(theta, float)
        return np.where(theta <= np.pi / 2, np.exp(-(theta**2) / self.w_theta**2), 0.0)


@dataclass(frozen=True)
class Tophat:
    """Uniform angular cone of half-angle ``r_theta`` (uniformly lit lens)."""

    r_theta: float

    def __post_init__(self):
        if not 0.0 < self.r_theta < np.pi / 2:
            raise ValueError(f"r_theta must lie in (0, pi/2), got {self.r_theta}")

    @property
    def width(self) -> float:
        return self.r_theta

    @property
    def support(self) -> float:
        return self.r_theta

    def profile(self, theta):
        theta = np.asarray(theta, float)
        return np.where(theta <= self.r_theta, 1.0, 0.0)


BeamShape = Gaussian | Tophat


@dataclass(frozen=True)
class IncidentBeam:
    shape: BeamShape
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError(f"beam amplitude must be positive, got {self.amplitude}")

    @classmethod
    def gaussian(cls, w_theta: float, amplitude: float = 1.0) -> "IncidentBeam":
        return cls(Gaussian(w_theta), amplitude)

    @classmethod
    def tophat(cls, r_theta: float, amplitude: float = 1.0) -> "IncidentBeam":
        return cls(Tophat(r_theta), amplitude)


def bloch_phase(delta_over_gamma: float) -> float:
    """Steady-state phase of the induced dipole, ``cot(alpha) = -Delta/gamma``.

    The result lies in ``(0, pi)`` so that ``sin(alpha) > 0`` for any finite
    detuning.
    """
    return float(np.arctan2(1.0, -float(delta_over_gamma)))


def saturation(intensity_over_isat: float, delta_over_gamma: float) -> tuple[float, float]:
    """Saturation parameter and the coherent fraction ``1/(1+s)`` of scattering."""
    if intensity_over_isat < 0:
        raise ValueError("intensity must be non-negative")
    s = intensity_over_isat / (1.0 + delta_over_gamma**2)
    return s, 1.0 / (1.0 + s)


@dataclass(frozen=True)
class Dipole:
    """Induced circular dipole.

    Parameters
    ----------
    sigma : int
        Handedness, +1 for ``u_+ = (x - i z)/sqrt(2)``, -1 for ``u_-``.
    detuning : float
        Laser detuning in units of gamma. Fixes the phase ``alpha``.
    scattered_amplitude : float
        Real, non-negative far-field amplitude of the scattered wave.
    kd : float
        Displacement of the atom along x, in units of 1/k.
    """

    sigma: int = 1
    detuning: float = 0.0
    scattered_amplitude: float = 1.0
    kd: float = 0.0

    def __post_init__(self):
        if self.sigma not in (1, -1):
            raise ValueError(f"sigma must be +1 or -1, got {self.sigma!r}")
        if self.scattered_amplitude < 0:
            raise ValueError("scattered_amplitude must be non-negative")

    @property
    def alpha(self) -> float:
        return bloch_phase(self.detuning)

    @property
    def polarization(self) -> np.ndarray:
        return spherical_unit(self.sigma)


def incident_field(beam: IncidentBeam, theta, phi) -> np.ndarray:
    """Angular spectrum of the x-polarized incident beam (real-valued)."""
    g = beam.amplitude * beam.shape.profile(theta)
    return (g[..., None] * polarization_vector(theta, phi)).astype(complex)


def dipole_field(dip: Dipole, theta, phi) -> np.ndarray:
    """Far field of the circular dipole, ``E_sc i e^{i alpha} (u x p) x u``.

    A displacement ``kd`` along x multiplies each plane-wave component by
    ``exp(-i kd sin(theta) cos(phi))``.
    """
    u = unit_vector(theta, phi)
    p = dip.polarization
    # (u x p) x u = p - (u.p) u  for unit u
    transverse = p - (u @ p)[..., None] * u
    phase = dip.scattered_amplitude * SCATTER_PREFACTOR * np.exp(1j * dip.alpha)
    if dip.kd:
        phase = phase * np.exp(-1j * dip.kd * u[..., 0])
    return np.asarray(phase)[..., None] * transverse
