"""Spin-dependent deflection of a focused beam by a circular atomic dipole.

Angles in radians, lengths in units of 1/k unless a docstring says SI, and
detunings in units of the half linewidth.
"""
__version__ = "0.1.0"

from .deflection import (
    DeflectionResult,
    NoRoot,
    deflection_analytic,
    deflection_numeric,
    equilibrium_displacement,
    radiant_profile,
    scan,
)
from .dynamics import SR88_TWEEZER, DriveSpec, TrapSpec, resonant_escape_estimate, simulate, trap_frequency
from .fields import Dipole, Gaussian, IncidentBeam, Tophat
from .focal import focal_map, spot_metrics
from .quadrature import NoConvergence, SphericalGrid
from .radiometry import DegenerateBeam, beam_power, solve_scattered_amplitude

__all__ = [
    "DeflectionResult", "NoRoot", "deflection_analytic", "deflection_numeric",
    "equilibrium_displacement", "radiant_profile", "scan",
    "SR88_TWEEZER", "DriveSpec", "TrapSpec", "resonant_escape_estimate", "simulate",
    "trap_frequency", "Dipole", "Gaussian", "IncidentBeam", "Tophat",
    "focal_map", "spot_metrics", "NoConvergence", "SphericalGrid",
    "DegenerateBeam", "beam_power", "solve_scattered_amplitude",
]
