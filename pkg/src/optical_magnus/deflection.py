"""Beam deflection, transverse force and the spin-dependent trap offset.

Sign convention: ``delta_theta > 0`` exactly when the force on the atom points
along ``-x``. Forces are reported in units of ``P/c``, so ``force_x`` is
``-delta_theta``.

Two independent routes are provided. :func:`deflection_numeric` integrates
the interference intensity (displacements enter only through the plane-wave
phase ``exp(-i kd sin(theta) cos(phi))``); :func:`deflection_analytic` uses the
leading-order closed forms in the beam width with the ``(1 - sigma kd)``
displacement factor. Neither route calls the other.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .fields import Dipole, IncidentBeam, Tophat, dipole_field, unit_vector
from .quadrature import MAX_NODES, SphericalGrid, integrate_many
from .radiometry import DEFAULT_REL_TOL, amplitude_solution, radiant_components

KD_BRACKET = 2.0


class NoRoot(RuntimeError):
    """The transverse force keeps its sign across the displacement bracket."""


@dataclass(frozen=True)
class DeflectionResult:
    """Change of the mean wave vector (units of k) and the derived angle/force."""

    delta_k: np.ndarray
    method: str
    scattered_amplitude: float | None = None
    achieved_tol: float | None = None
    energy_residual: float | None = None
    inputs: dict = field(default_factory=dict)

    @property
    def delta_theta(self) -> float:
        return float(self.delta_k[0])

    @property
    def force_x(self) -> float:
        """Transverse force in units of ``P/c``."""
        return -self.delta_theta


def _shape_of(beam_or_shape):
    return beam_or_shape.shape if isinstance(beam_or_shape, IncidentBeam) else beam_or_shape


def _jsc_first_moment(dip: Dipole) -> tuple[np.ndarray, float]:
    def f(theta, phi):
        j = 0.5 * np.sum(np.abs(dipole_field(dip, theta, phi)) ** 2, axis=-1)[..., None]
        return np.concatenate([j, unit_vector(theta, phi) * j], axis=-1)

    # cubic polynomial in u: 8 x 8 nodes integrate it exactly
    v = integrate_many(f, SphericalGrid(8, 8)).real
    return v[1:], float(v[0])


def deflection_numeric(
    beam: IncidentBeam,
    detuning: float,
    sigma: int = 1,
    kd: float = 0.0,
    rel_tol: float = DEFAULT_REL_TOL,
    max_nodes: int = MAX_NODES,
) -> DeflectionResult:
    """Deflection from quadrature of ``u J_if`` with the energy-conserving amplitude."""
    sol = amplitude_solution(beam, detuning, sigma, kd, rel_tol, max_nodes)
    esc = sol.scattered_amplitude
    mom = sol.moments
    dip = Dipole(sigma=sigma, detuning=detuning, scattered_amplitude=esc, kd=kd)

    # scattered light carries no net momentum; checked, never added
    sc_moment, sc_power = _jsc_first_moment(dip)
    if np.linalg.norm(sc_moment) > 1e-12 * max(sc_power, 1e-300):
        raise RuntimeError(f"scattered first moment {sc_moment} is not zero")

    delta_k = esc * mom.if_moment / mom.power
    residual = esc * mom.if_total + sc_power
    return DeflectionResult(
        delta_k=delta_k,
        method="numeric",
        scattered_amplitude=esc,
        achieved_tol=mom.achieved_tol,
        energy_residual=residual / mom.power,
        inputs=_inputs(beam, detuning, sigma, kd),
    )


def _width_factor(shape) -> tuple[float, float]:
    """(transverse, forward) leading-order geometric factors."""
    if isinstance(shape, Tophat):
        r = shape.r_theta
        return r**4 / 4, r**2 / 2
    w = shape.w_theta
    return w**4, w**2


def deflection_analytic(beam_or_shape, detuning: float, sigma: int = 1, kd: float = 0.0) -> DeflectionResult:
    """Leading-order closed form.

    ``delta_theta = sigma (3/4) Delta/(1+Delta^2) (1 - sigma kd) {w^4 | r^4/4}``.
    The forward component is ``-(3/2) w^2 / (1+Delta^2)`` (Gaussian) or
    ``-(3/4) r^2 / (1+Delta^2)`` (tophat), written so that it stays finite on
    resonance; it is taken at ``kd = 0``.
    """
    shape = _shape_of(beam_or_shape)
    transverse, forward = _width_factor(shape)
    lorentz = detuning / (1.0 + detuning**2)
    dx = sigma * 0.75 * lorentz * transverse * (1.0 - sigma * kd)
    dz = -1.5 * forward / (1.0 + detuning**2)
    return DeflectionResult(
        delta_k=np.array([dx, 0.0, dz]),
        method="analytic",
        inputs=_inputs(beam_or_shape, detuning, sigma, kd),
    )


def _inputs(beam_or_shape, detuning, sigma, kd) -> dict:
    shape = _shape_of(beam_or_shape)
    return {
        "shape": "tophat" if isinstance(shape, Tophat) else "gauss",
        "width": shape.width,
        "detuning": float(detuning),
        "sigma": int(sigma),
        "kd": float(kd),
    }


def transverse_force(beam, detuning, sigma, kd, method="numeric", **kw) -> float:
    if method == "analytic":
        return deflection_analytic(beam, detuning, sigma, kd).force_x
    return deflection_numeric(beam, detuning, sigma, kd, **kw).force_x


def equilibrium_displacement(
    beam: IncidentBeam,
    detuning: float,
    sigma: int = 1,
    method: str = "numeric",
    xtol: float = 1e-10,
    **kw,
) -> float:
    """Displacement ``kd*`` along x where the transverse force vanishes.

    Searched in ``[0, 2 sigma]``; to leading order the root is ``kd* = sigma``,
    i.e. one reduced wavelength towards the side set by the dipole handedness.
    """
    if detuning == 0:
        raise ValueError("on resonance the transverse force vanishes for every displacement")

    def f(kd):
        return transverse_force(beam, detuning, sigma, kd, method, **kw)

    lo, hi = sorted((0.0, KD_BRACKET * sigma))
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoRoot(
            f"force has the same sign at kd={lo} ({f_lo:.3e}) and kd={hi} ({f_hi:.3e})"
        )
    return float(brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps))


SCAN_COLUMNS = (
    "detuning",
    "kd",
    "sigma",
    "delta_theta_analytic",
    "force_x_analytic",
    "delta_theta_numeric",
    "force_x_numeric",
    "delta_k_x",
    "delta_k_y",
    "delta_k_z",
    "scattered_ratio",
    "energy_residual",
    "achieved_tol",
)


def scan(
    beam: IncidentBeam,
    axis: str,
    start: float,
    stop: float,
    n_points: int,
    sigma: int = 1,
    detuning: float = 1.0,
    kd: float = 0.0,
    **kw,
) -> dict[str, np.ndarray]:
    """Evaluate both deflection routes along a detuning or displacement axis.

    ``axis`` is ``"detuning"`` (``kd`` held fixed) or ``"displacement"``
    (``detuning`` held fixed). Returns columns keyed by :data:`SCAN_COLUMNS`.
    """
    if n_points < 2:
        raise ValueError("a scan needs at least two points")
    if axis not in ("detuning", "displacement"):
        raise ValueError(f"unknown scan axis {axis!r}")
    values = np.linspace(start, stop, n_points)
    rows = []
    for v in values:
        d, k = (v, kd) if axis == "detuning" else (detuning, v)
        an = deflection_analytic(beam, d, sigma, k)
        nu = deflection_numeric(beam, d, sigma, k, **kw)
        rows.append((
            d, k, sigma,
            an.delta_theta, an.force_x,
            nu.delta_theta, nu.force_x,
            *nu.delta_k,
            nu.scattered_amplitude / beam.amplitude,
            nu.energy_residual,
            nu.achieved_tol,
        ))
    table = np.array(rows, dtype=float)
    return {name: table[:, i] for i, name in enumerate(SCAN_COLUMNS)}


def radiant_profile(
    beam: IncidentBeam,
    detuning: float,
    sigma: int = 1,
    n_theta: int = 181,
    theta_max: float = np.pi / 2,
    kd: float = 0.0,
    **kw,
) -> dict[str, np.ndarray]:
    """Radiant intensities in the dipole plane along a signed polar angle.

    Positive angles are ``(theta, phi=0)``, negative ones ``(|theta|, phi=pi)``.
    Intensities are normalized to the on-axis incident value.
    """
    if n_theta < 16:
        raise ValueError("profile needs n_theta >= 16")
    esc = amplitude_solution(beam, detuning, sigma, kd, **kw).scattered_amplitude
    dip = Dipole(sigma=sigma, detuning=detuning, scattered_amplitude=esc, kd=kd)
    pos = np.linspace(0.0, theta_max, n_theta)
    signed = np.concatenate([-pos[:0:-1], pos])
    theta = np.abs(signed)
    phi = np.where(signed < 0, np.pi, 0.0)
    comp = radiant_components(beam, dip, theta, phi)
    norm = 0.5 * beam.amplitude**2
    return {
        "theta": signed,
        "j_in": comp.j_in / norm,
        "j_sc": comp.j_sc / norm,
        "j_if": comp.j_if / norm,
        "j_total": comp.total / norm,
    }


def peak_angle(profile: dict[str, np.ndarray]) -> float:
    return float(profile["theta"][np.argmax(profile["j_total"])])


def scaling_exponent(widths, deflections) -> float:
    """Slope of ``log|delta_theta|`` against ``log(width)``."""
    slope, _ = np.polyfit(np.log(widths), np.log(np.abs(deflections)), 1)
    return float(slope)


def leading_order_ratio(beam: IncidentBeam, detuning: float, sigma: int = 1, **kw) -> float:
    num = deflection_numeric(beam, detuning, sigma, **kw).delta_theta
    return num / deflection_analytic(beam, detuning, sigma).delta_theta


def max_deflection(shape) -> float:
    """``|delta_theta|`` at ``Delta = +/- gamma``: ``3 w^4/8`` or ``3 r^4/32``."""
    transverse, _ = _width_factor(_shape_of(shape))
    return 0.375 * transverse
