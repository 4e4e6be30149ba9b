"""Invariant suite behind ``optical-magnus selfcheck``.

Every check returns a :class:`CheckResult`; exceptions raised inside a check
(``NoConvergence`` on a starved grid, ``DegenerateBeam`` after a sign
mutation, ...) are reported as failures rather than propagated.
"""
from __future__ import annotations

import math
from contextlib import contextmanager, nullcontext
from dataclasses import dataclass

import numpy as np
from scipy.special import sph_harm_y

from . import fields
from .deflection import (
    deflection_analytic,
    deflection_numeric,
    equilibrium_displacement,
    scaling_exponent,
)
from .dynamics import SR88_TWEEZER, DriveSpec, simulate, trap_frequency
from .fields import Dipole, IncidentBeam, dipole_field, incident_field, unit_vector
from .quadrature import MAX_NODES, SphericalGrid, integrate, integrate_adaptive
from .radiometry import beam_power, energy_balance, radiant_components, solve_scattered_amplitude


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@contextmanager
def flipped_scatter_prefactor():
    """Temporarily replace the ``i`` of the dipole far field by ``-i`` (mutation hook)."""
    old = fields.SCATTER_PREFACTOR
    fields.SCATTER_PREFACTOR = -old
    try:
        yield
    finally:
        fields.SCATTER_PREFACTOR = old


def _directions(n=200, seed=7):
    rng = np.random.default_rng(seed)
    return np.arccos(rng.uniform(-1, 1, n)), rng.uniform(0, 2 * np.pi, n)


def check_transversality(**_):
    theta, phi = _directions()
    u = unit_vector(theta, phi)
    worst = 0.0
    for beam in (IncidentBeam.gaussian(0.6), IncidentBeam.tophat(1.2)):
        worst = max(worst, np.max(np.abs(np.sum(incident_field(beam, theta, phi) * u, -1))))
    for sigma in (1, -1):
        for kd in (0.0, 0.7):
            dip = Dipole(sigma, 0.8, 1.0, kd)
            worst = max(worst, np.max(np.abs(np.sum(dipole_field(dip, theta, phi) * u, -1))))
    return worst < 1e-12, f"max |E.u| = {worst:.1e}"


def check_antipodal_symmetry(**_):
    theta, phi = _directions()
    worst = 0.0
    for sigma in (1, -1):
        dip = Dipole(sigma, -1.3, 1.0)
        a = np.sum(np.abs(dipole_field(dip, theta, phi)) ** 2, -1)
        b = np.sum(np.abs(dipole_field(dip, np.pi - theta, np.pi + phi)) ** 2, -1)
        worst = max(worst, np.max(np.abs(a - b)))
    return worst < 1e-14, f"max |J_sc(O) - J_sc(-O)| = {worst:.1e}"


def check_scattered_first_moment(max_nodes=MAX_NODES, **_):
    dip = Dipole(1, 1.0, 1.0)

    def f(theta, phi):
        j = 0.5 * np.sum(np.abs(dipole_field(dip, theta, phi)) ** 2, -1)[..., None]
        return np.concatenate([j, unit_vector(theta, phi) * j], -1)

    v, _, _ = integrate_adaptive(f, None, 1e-13, n_start=4, max_nodes=max_nodes)
    moment = float(np.linalg.norm(v[1:]))
    return moment < 1e-13 * abs(v[0]), f"|int u J_sc| = {moment:.1e}"


def check_forward_attenuation(**_):
    beam = IncidentBeam.gaussian(0.3)
    j_if = radiant_components(beam, Dipole(1, 0.0, 0.1), 0.0, 0.0).j_if
    return bool(j_if < 0), f"J_if(axis) = {float(j_if):.3e} on resonance"


def check_energy_conservation(max_nodes=MAX_NODES, **_):
    worst = 0.0
    for beam in (IncidentBeam.gaussian(0.1), IncidentBeam.tophat(0.2), IncidentBeam.gaussian(0.6)):
        power = beam_power(beam).numeric
        for detuning, sigma, kd in ((-1.0, 1, 0.0), (0.5, -1, 0.0), (2.0, 1, 0.8), (-0.5, -1, -1.0)):
            esc = solve_scattered_amplitude(beam, detuning, sigma, kd, max_nodes=max_nodes)
            residual = energy_balance(beam, Dipole(sigma, detuning, esc, kd))
            worst = max(worst, abs(residual) / power)
    return worst < 1e-9, f"max |int(J_if + J_sc)| / P = {worst:.1e}"


def check_quadrature_exactness(**_):
    n = 8
    grid = SphericalGrid(n, 2 * n)
    worst = 0.0
    for l in range(n):
        for m in range(-l, l + 1):
            for l2 in range(n - l):
                for m2 in range(-l2, l2 + 1):
                    val = integrate(
                        lambda t, p: sph_harm_y(l, m, t, p) * np.conj(sph_harm_y(l2, m2, t, p)), grid
                    )
                    expected = 1.0 if (l, m) == (l2, m2) else 0.0
                    worst = max(worst, abs(val - expected))
    return worst < 1e-12, f"max |<Y, Y'> - delta| = {worst:.1e} (l + l' <= {n - 1})"


def check_handedness_mirror(max_nodes=MAX_NODES, **_):
    beam = IncidentBeam.gaussian(0.1)
    a_p = deflection_analytic(beam, 0.7, 1, 0.3).delta_theta
    a_m = deflection_analytic(beam, 0.7, -1, -0.3).delta_theta
    n_p = deflection_numeric(beam, 0.7, 1, max_nodes=max_nodes).delta_theta
    n_m = deflection_numeric(beam, 0.7, -1, max_nodes=max_nodes).delta_theta
    exact = a_p == -a_m
    rel = abs(n_p + n_m) / abs(n_p)
    return exact and rel < 1e-9, f"analytic exact={exact}, numeric mismatch {rel:.1e}"


def check_detuning_oddness(max_nodes=MAX_NODES, **_):
    beam = IncidentBeam.gaussian(0.1)
    plus = deflection_numeric(beam, 1.0, max_nodes=max_nodes).delta_theta
    minus = deflection_numeric(beam, -1.0, max_nodes=max_nodes).delta_theta
    rel = abs(plus + minus) / abs(plus)
    return rel < 0.02, f"|dt(D) + dt(-D)| / |dt| = {rel:.1e}"


def check_scaling_exponent(max_nodes=MAX_NODES, **_):
    widths = [0.05, 0.075, 0.1, 0.15]
    slopes = []
    for make in (IncidentBeam.gaussian, IncidentBeam.tophat):
        d = [deflection_numeric(make(w), 1.0, max_nodes=max_nodes).delta_theta for w in widths]
        slopes.append(scaling_exponent(widths, d))
    ok = all(abs(s - 4.0) <= 0.1 for s in slopes)
    return ok, "slopes gauss={:.3f} tophat={:.3f}".format(*slopes)


def check_analytic_agreement(max_nodes=MAX_NODES, **_):
    worst = 0.0
    for beam in (IncidentBeam.gaussian(0.1), IncidentBeam.tophat(0.1)):
        num = deflection_numeric(beam, 1.0, max_nodes=max_nodes).delta_theta
        worst = max(worst, abs(num / deflection_analytic(beam, 1.0).delta_theta - 1))
    return worst < 0.05, f"max |numeric/analytic - 1| = {worst:.2%} at width 0.1"


def check_zero_crossing(max_nodes=MAX_NODES, **_):
    roots = [
        equilibrium_displacement(make(0.2), -1.0, 1, max_nodes=max_nodes)
        for make in (IncidentBeam.gaussian, IncidentBeam.tophat)
    ]
    worst = max(abs(r - 1.0) for r in roots)
    return worst < 0.03, "kd* = {:.4f} (gauss), {:.4f} (tophat)".format(*roots)


def _undriven(dt_fraction, periods=5.0, x0_waists=0.3):
    trap = SR88_TWEEZER
    omega = trap_frequency(trap)
    period = 2 * math.pi / omega
    drive = DriveSpec(omega_b=omega, m_j=1)
    return simulate(
        trap, drive, period * dt_fraction, periods * period,
        x0=x0_waists * trap.waist, drive_amplitude=0.0, stop_on_escape=False,
    )


def check_rk4_order(**_):
    ref = _undriven(1 / 3200).positions[-1]
    e1 = abs(_undriven(1 / 100).positions[-1] - ref)
    e2 = abs(_undriven(1 / 200).positions[-1] - ref)
    ratio = e1 / e2
    return 12.0 < ratio < 20.0, f"error ratio on halving dt = {ratio:.2f}"


def check_energy_drift(**_):
    tr = _undriven(1 / 200, periods=100, x0_waists=0.05)
    drift = float(np.max(np.abs(tr.energies - tr.energies[0]))) / SR88_TWEEZER.depth
    return drift < 1e-8, f"max |E(t) - E(0)| / U0 = {drift:.1e} over 100 periods"


def check_drive_mirror(**_):
    trap = SR88_TWEEZER
    omega = trap_frequency(trap)
    dt = 2 * math.pi / (100 * omega)
    t_max = 6 * 2 * math.pi / omega
    up = simulate(trap, DriveSpec(omega, 1), dt, t_max, stop_on_escape=False)
    down = simulate(trap, DriveSpec(omega, -1), dt, t_max, stop_on_escape=False)
    worst = float(np.max(np.abs(up.positions + down.positions)))
    return worst == 0.0, f"max |x+(t) + x-(t)| = {worst:.1e} m"


CHECKS = {
    "transversality": check_transversality,
    "antipodal_symmetry": check_antipodal_symmetry,
    "scattered_first_moment": check_scattered_first_moment,
    "forward_attenuation": check_forward_attenuation,
    "energy_conservation": check_energy_conservation,
    "quadrature_exactness": check_quadrature_exactness,
    "handedness_mirror": check_handedness_mirror,
    "detuning_oddness": check_detuning_oddness,
    "scaling_exponent": check_scaling_exponent,
    "analytic_agreement": check_analytic_agreement,
    "zero_crossing": check_zero_crossing,
    "rk4_order": check_rk4_order,
    "energy_drift": check_energy_drift,
    "drive_mirror": check_drive_mirror,
}


def run_checks(max_nodes: int = MAX_NODES, flip_scatter_sign: bool = False, names=None) -> list[CheckResult]:
    """Run the invariant suite; ``flip_scatter_sign`` injects the ``i -> -i`` mutation."""
    selected = CHECKS if names is None else {n: CHECKS[n] for n in names}
    results = []
    ctx = flipped_scatter_prefactor() if flip_scatter_sign else nullcontext()
    with ctx:
        for name, check in selected.items():
            try:
                ok, detail = check(max_nodes=max_nodes)
            except Exception as exc:  # reported, not raised
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            results.append(CheckResult(name, bool(ok), detail))
    return results

