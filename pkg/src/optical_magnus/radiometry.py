"""Radiant intensities of incident, scattered and interference fields.

Radiant intensity is ``J = |E|^2 / 2`` (Z0 = 1), so ``J dOmega`` is the power
leaving through a solid-angle element. The scattered amplitude is never taken
from atomic constants: it follows from requiring that scattering plus
interference carry no net power (the atom only redistributes light).

Detunings are in units of gamma throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .fields import Dipole, IncidentBeam, Tophat, dipole_field, incident_field, unit_vector
from .quadrature import MAX_NODES, SphericalGrid, integrate_adaptive, integrate_many

# A Gaussian spectrum is integrated over theta <= min(pi/2, 7 w); beyond that
# the field is below exp(-49) of its peak.
GAUSS_SUPPORT_WIDTHS = 7.0
DEFAULT_REL_TOL = 1e-12


class DegenerateBeam(RuntimeError):
    """The interference term does not remove power, so no amplitude balances it."""


@dataclass(frozen=True)
class RadiantComponents:
    j_in: np.ndarray
    j_sc: np.ndarray
    j_if: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.j_in + self.j_sc + self.j_if


def support_cap(shape) -> float:
    """Polar angle beyond which the incident spectrum is (numerically) zero."""
    if isinstance(shape, IncidentBeam):
        shape = shape.shape
    if isinstance(shape, Tophat):
        return shape.r_theta
    return min(np.pi / 2, GAUSS_SUPPORT_WIDTHS * shape.w_theta)


def radiant_components(beam: IncidentBeam, dip: Dipole, theta, phi) -> RadiantComponents:
    """Pointwise ``J_in``, ``J_sc`` and ``J_if`` including the displacement phase."""
    e_in = incident_field(beam, theta, phi)
    e_sc = dipole_field(dip, theta, phi)
    j_in = 0.5 * np.sum(np.abs(e_in) ** 2, axis=-1)
    j_sc = 0.5 * np.sum(np.abs(e_sc) ** 2, axis=-1)
    j_if = np.real(np.sum(np.conj(e_in) * e_sc, axis=-1))
    return RadiantComponents(j_in, j_sc, j_if)


def interference_analytic(
    beam: IncidentBeam, theta, phi, detuning: float, scattered_amplitude: float, sigma: int = 1
):
    """Closed-form interference term of an undisplaced dipole.

    ``J_if = -E_sc E_0 g(theta) f / sqrt(2)`` with
    ``f = [cos(t) cos(p)^2 + sin(p)^2 - sigma * Delta sin(t) cos(p)] / sqrt(1 + Delta^2)``.
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    f = (ct * cp**2 + sp**2 - sigma * detuning * st * cp) / math.hypot(1.0, detuning)
    g = beam.amplitude * beam.shape.profile(theta)
    return -scattered_amplitude * g * f / math.sqrt(2.0)


class BeamPower(NamedTuple):
    numeric: float
    analytic: float


def beam_power_closed_form(beam: IncidentBeam) -> float:
    """Beam power from the peak radiant intensity times an effective solid angle.

    Exact for the tophat; leading order in ``w_theta`` for the Gaussian.
    """
    peak = 0.5 * beam.amplitude**2
    shape = beam.shape
    if isinstance(shape, Tophat):
        return peak * 2.0 * math.pi * (1.0 - math.cos(shape.r_theta))
    return peak * math.pi * shape.w_theta**2 / 2.0


def _incident_integrand(beam):
    def f(theta, phi):
        e = incident_field(beam, theta, phi)
        j = 0.5 * np.sum(np.abs(e) ** 2, axis=-1)
        return np.concatenate([j[..., None], unit_vector(theta, phi) * j[..., None]], axis=-1)

    return f


def _incident_moments(beam, rel_tol, max_nodes=MAX_NODES):
    value, achieved, _ = integrate_adaptive(
        _incident_integrand(beam), support_cap(beam), rel_tol, max_nodes=max_nodes
    )
    return value.real, achieved


def beam_power(beam: IncidentBeam, rel_tol: float = DEFAULT_REL_TOL) -> BeamPower:
    """Total incident power, by quadrature and by the closed form."""
    value, _ = _incident_moments(beam, rel_tol)
    return BeamPower(float(value[0]), beam_power_closed_form(beam))


def incident_mean_k(beam: IncidentBeam, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """Power-weighted mean wave vector of the incident beam, in units of k."""
    value, _ = _incident_moments(beam, rel_tol)
    return value[1:] / value[0]


def mean_k_closed_form(shape) -> float:
    """z component of the incident mean wave vector (Gaussian: to order w^2)."""
    if isinstance(shape, IncidentBeam):
        shape = shape.shape
    if isinstance(shape, Tophat):
        return math.cos(shape.r_theta / 2) ** 2
    return 1.0 - shape.w_theta**2 / 4


def scattered_pattern_norm(sigma: int = 1) -> float:
    """``integral |(u x p) x u|^2 / 2 dOmega`` for a unit circular dipole (= 4 pi/3)."""
    dip = Dipole(sigma=sigma, scattered_amplitude=1.0)

    def f(theta, phi):
        return 0.5 * np.sum(np.abs(dipole_field(dip, theta, phi)) ** 2, axis=-1)

    # the integrand is a quadratic polynomial in u, so a small grid is exact
    return float(integrate_many(f, SphericalGrid(8, 8)).real)


@dataclass(frozen=True)
class BeamMoments:
    """Integrals of the incident and unit-amplitude interference intensities.

    ``if_total`` and ``if_moment`` are for ``scattered_amplitude = 1``; both are
    linear in the amplitude.
    """

    power: float
    k_in: np.ndarray
    if_total: float
    if_moment: np.ndarray
    achieved_tol: float
    grid: SphericalGrid


def beam_moments(
    beam: IncidentBeam,
    detuning: float,
    sigma: int = 1,
    kd: float = 0.0,
    rel_tol: float = DEFAULT_REL_TOL,
    max_nodes: int = MAX_NODES,
) -> BeamMoments:
    unit = Dipole(sigma=sigma, detuning=detuning, scattered_amplitude=1.0, kd=kd)

    def f(theta, phi):
        u = unit_vector(theta, phi)
        e_in = incident_field(beam, theta, phi)
        e_sc = dipole_field(unit, theta, phi)
        j_in = 0.5 * np.sum(np.abs(e_in) ** 2, axis=-1)[..., None]
        j_if = np.real(np.sum(np.conj(e_in) * e_sc, axis=-1))[..., None]
        return np.concatenate([j_in, u * j_in, j_if, u * j_if], axis=-1)

    value, achieved, grid = integrate_adaptive(f, support_cap(beam), rel_tol, max_nodes=max_nodes)
    value = value.real
    return BeamMoments(
        power=float(value[0]),
        k_in=value[1:4] / value[0],
        if_total=float(value[4]),
        if_moment=value[5:8],
        achieved_tol=achieved,
        grid=grid,
    )


@dataclass(frozen=True)
class AmplitudeSolution:
    scattered_amplitude: float
    moments: BeamMoments
    pattern_norm: float


def amplitude_solution(
    beam: IncidentBeam,
    detuning: float,
    sigma: int = 1,
    kd: float = 0.0,
    rel_tol: float = DEFAULT_REL_TOL,
    max_nodes: int = MAX_NODES,
) -> AmplitudeSolution:
    """Solve ``a E_sc^2 + b E_sc = 0`` for the positive scattered amplitude."""
    moments = beam_moments(beam, detuning, sigma, kd, rel_tol, max_nodes)
    a = scattered_pattern_norm(sigma)
    b = moments.if_total
    if not b < 0:
        raise DegenerateBeam(
            f"interference integral is {b:.3e} >= 0; the scattered wave would add power"
        )
    return AmplitudeSolution(-b / a, moments, a)


def solve_scattered_amplitude(
    beam: IncidentBeam,
    detuning: float,
    sigma: int = 1,
    kd: float = 0.0,
    rel_tol: float = DEFAULT_REL_TOL,
    max_nodes: int = MAX_NODES,
) -> float:
    """Scattered amplitude fixed by energy conservation (same units as ``beam.amplitude``)."""
    return amplitude_solution(beam, detuning, sigma, kd, rel_tol, max_nodes).scattered_amplitude


def scattered_amplitude_closed_form(shape, detuning: float) -> float:
    """Ratio ``E_sc / E_0`` (Gaussian: leading order in ``w_theta``; tophat: exact)."""
    if isinstance(shape, IncidentBeam):
        shape = shape.shape
    sin_alpha = 1.0 / math.hypot(1.0, detuning)
    pre = 3.0 * sin_alpha / (4.0 * math.sqrt(2.0))
    if isinstance(shape, Tophat):
        r = shape.r_theta
        return pre * math.sin(r / 2) ** 2 * (math.cos(r) + 3.0)
    return pre * shape.w_theta**2


def energy_balance(beam: IncidentBeam, dip: Dipole, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """``integral (J_if + J_sc) dOmega`` from the pointwise intensities.

    Independent of :func:`beam_moments`: the interference term is integrated
    over the beam support, the scattered term over the full sphere.
    """

    def j_if(theta, phi):
        return radiant_components(beam, dip, theta, phi).j_if

    def j_sc(theta, phi):
        return 0.5 * np.sum(np.abs(dipole_field(dip, theta, phi)) ** 2, axis=-1)

    i_if, _, _ = integrate_adaptive(j_if, support_cap(beam), rel_tol, n_start=24)
    i_sc, _, _ = integrate_adaptive(j_sc, None, rel_tol, n_start=8)
    return i_if.real + i_sc.real

