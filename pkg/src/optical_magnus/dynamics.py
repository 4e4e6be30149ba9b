"""Spin-dependent shaking of an atom in a Gaussian tweezer (SI units).

A magnetic field rotating at ``omega_B`` in the yz plane moves the trap centre
of an ``m_j`` state along x as ``x_eq(t) = -m_j * lambdabar * cos(omega_B t)``.
The atom is modelled in 1D along x with the Gaussian-beam potential
``U(x, t) = -U0 exp(-2 (x - x_eq)^2 / w0^2)``; a harmonic potential with the
same curvature is kept as a control.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

# CODATA values used by the dynamics module
CONSTANTS = {
    "k_B": constants.k,
    "u": constants.atomic_mass,
    "mu_B": constants.physical_constants["Bohr magneton"][0],
    "hbar": constants.hbar,
    "gauss": 1e-4,
}

ADIABATIC_THRESHOLD = 100.0


class StepTooLarge(ValueError):
    """Time step above ``2 pi / (100 max(omega, omega_B))``."""


@dataclass(frozen=True)
class TrapSpec:
    wavelength: float
    waist: float
    depth: float
    mass: float

    def __post_init__(self):
        for name in ("wavelength", "waist", "depth", "mass"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def lambdabar(self) -> float:
        return self.wavelength / (2 * math.pi)

    @classmethod
    def from_lab_units(cls, wavelength_um, waist_um, depth_uK, mass_u) -> "TrapSpec":
        return cls(
            wavelength=wavelength_um * 1e-6,
            waist=waist_um * 1e-6,
            depth=depth_uK * 1e-6 * CONSTANTS["k_B"],
            mass=mass_u * CONSTANTS["u"],
        )


# 88Sr in a 20 uK deep, 2 um waist tweezer at 0.8 um
SR88_TWEEZER = TrapSpec.from_lab_units(0.8, 2.0, 20.0, 88.0)


@dataclass(frozen=True)
class DriveSpec:
    omega_b: float
    m_j: int = 1
    b_field: float = 2 * CONSTANTS["gauss"]

    def __post_init__(self):
        if not self.omega_b > 0:
            raise ValueError("omega_b must be positive")
        if self.m_j not in (-1, 0, 1):
            raise ValueError(f"m_j must be -1, 0 or 1, got {self.m_j}")
        if self.b_field < 0:
            raise ValueError("b_field must be non-negative")

    @property
    def trapped(self) -> bool:
        # m_j = 0 sees no circular component in the j=1 -> j'=0 scheme
        return self.m_j != 0


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    energies: np.ndarray
    escape_time: float | None
    criterion: str | None = None

    def drive_cycles(self, omega_b: float) -> float | None:
        if self.escape_time is None:
            return None
        return self.escape_time * omega_b / (2 * math.pi)


def trap_frequency(trap: TrapSpec) -> float:
    """Radial angular frequency ``sqrt(4 U0 / (m w0^2))`` of the Gaussian well."""
    return math.sqrt(4 * trap.depth / (trap.mass * trap.waist**2))


def resonant_escape_estimate(trap: TrapSpec) -> tuple[float, float]:
    """Drive cycles and exit speed for a resonantly shaken harmonic trap.

    Shaking by ``lambdabar`` at the trap frequency grows the amplitude as
    ``(omega lambdabar / 2) t``. The atom leaves once the oscillation energy
    reaches ``U0``, i.e. at amplitude ``w0/sqrt(2)``. That takes
    ``w0 / (sqrt(2) pi lambdabar)`` cycles and ends at speed ``omega w0 / sqrt(2)``.
    """
    omega = trap_frequency(trap)
    n_cycles = trap.waist / (math.sqrt(2) * math.pi * trap.lambdabar)
    return n_cycles, omega * trap.waist / math.sqrt(2)


def adiabaticity_check(drive: DriveSpec, g_factor: float = 1.0) -> float:
    """Larmor frequency over the field rotation rate, ``g mu_B B / (hbar omega_B)``.

    Ratios above :data:`ADIABATIC_THRESHOLD` count as adiabatic; ``B = 0`` gives 0.
    """
    larmor = g_factor * CONSTANTS["mu_B"] * drive.b_field / CONSTANTS["hbar"]
    return larmor / drive.omega_b


def is_adiabatic(drive: DriveSpec, g_factor: float = 1.0) -> bool:
    return adiabaticity_check(drive, g_factor) > ADIABATIC_THRESHOLD


def max_step(trap: TrapSpec, drive: DriveSpec) -> float:
    return 2 * math.pi / (100 * max(trap_frequency(trap), drive.omega_b))


def _rk4_step(acc, x, v, t, dt):
    k1x, k1v = v, acc(x, t)
    k2x, k2v = v + 0.5 * dt * k1v, acc(x + 0.5 * dt * k1x, t + 0.5 * dt)
    k3x, k3v = v + 0.5 * dt * k2v, acc(x + 0.5 * dt * k2x, t + 0.5 * dt)
    k4x, k4v = v + dt * k3v, acc(x + dt * k3x, t + dt)
    return (
        x + dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x),
        v + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v),
    )


def simulate(
    trap: TrapSpec,
    drive: DriveSpec,
    dt: float,
    t_max: float,
    potential: str = "gaussian",
    x0: float | None = None,
    v0: float = 0.0,
    drive_amplitude: float | None = None,
    stop_on_escape: bool = True,
) -> Trajectory:
    """Integrate the shaken-trap motion with fixed-step classical RK4.

    Parameters
    ----------
    potential : {"gaussian", "harmonic"}
    x0 : float, optional
        Initial position; defaults to the trap centre at ``t = 0``.
    drive_amplitude : float, optional
        Shaking amplitude in metres; defaults to ``lambdabar``. Zero turns the
        drive off.

    Escape is declared once ``E = m v^2/2 + U + U0`` exceeds ``U0`` (for the
    Gaussian well: the atom is unbound) or ``|x| > 3 w0``.
    """
    if dt > max_step(trap, drive) * (1 + 1e-12):
        raise StepTooLarge(f"dt={dt:.3e} s exceeds {max_step(trap, drive):.3e} s")
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    if potential not in ("gaussian", "harmonic"):
        raise ValueError(f"unknown potential {potential!r}")
    if not drive.trapped and drive_amplitude != 0:
        raise ValueError("m_j = 0 is not trapped by a purely circular dipole")

    U0, m, w0 = trap.depth, trap.mass, trap.waist
    omega = trap_frequency(trap)
    amp = trap.lambdabar if drive_amplitude is None else drive_amplitude
    shake = -drive.m_j * amp
    wb = drive.omega_b
    k_curv = 4 * U0 / (m * w0**2)

    def centre(t):
        return shake * math.cos(wb * t)

    if potential == "gaussian":
        def acc(x, t):
            d = x - centre(t)
            return -k_curv * d * math.exp(-2 * d * d / w0**2)

        def energy(x, v, t):
            d = x - centre(t)
            return 0.5 * m * v * v - U0 * math.exp(-2 * d * d / w0**2) + U0
    else:
        def acc(x, t):
            return -omega**2 * (x - centre(t))

        def energy(x, v, t):
            d = x - centre(t)
            return 0.5 * m * v * v + 0.5 * m * omega**2 * d * d

    n_steps = int(math.ceil(t_max / dt - 1e-9))
    x = centre(0.0) if x0 is None else x0
    v = v0
    ts, xs, vs, es = [0.0], [x], [v], [energy(x, v, 0.0)]
    escape, why = None, None
    for i in range(1, n_steps + 1):
        t_prev = (i - 1) * dt
        x, v = _rk4_step(acc, x, v, t_prev, dt)
        t = i * dt
        e = energy(x, v, t)
        ts.append(t)
        xs.append(x)
        vs.append(v)
        es.append(e)
        if escape is None and (e > U0 or abs(x) > 3 * w0):
            escape = t
            why = "energy > U0" if e > U0 else "|x| > 3 w0"
            if stop_on_escape:
                break
    return Trajectory(np.array(ts), np.array(xs), np.array(vs), np.array(es), escape, why)
