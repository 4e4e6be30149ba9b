"""Shaking a strontium atom out of a tweezer with a rotating field.

Run: python demos/05_trap_shaking.py
"""
import math

import numpy as np

from optical_magnus import SR88_TWEEZER, DriveSpec, resonant_escape_estimate, simulate, trap_frequency
from optical_magnus.dynamics import adiabaticity_check, max_step

trap = SR88_TWEEZER
omega = trap_frequency(trap)
n_est, v_est = resonant_escape_estimate(trap)
print(f"trap frequency {omega / 2 / math.pi:.1f} Hz")
print(f"estimate: {n_est:.3f} drive cycles, exit at {100 * v_est:.2f} cm/s")

drive = DriveSpec(omega, m_j=1)
print(f"adiabaticity mu_B B / (hbar omega_B) = {adiabaticity_check(drive):.0f}")

# a harmonic well keeps resonance and the amplitude grows linearly
period = 2 * math.pi / omega
tr = simulate(trap, drive, max_step(trap, drive), 10 * period, potential="harmonic")
print(f"harmonic: escapes after {tr.drive_cycles(omega):.3f} cycles ({tr.criterion})")

# the real Gaussian well softens, drifts off resonance and the atom stays
tr = simulate(trap, drive, max_step(trap, drive), 30 * period)
print(f"gaussian: escape_time={tr.escape_time}, peak energy {np.max(tr.energies) / trap.depth:.2f} U0")

# shaking three times harder does empty the gaussian trap
tr = simulate(trap, drive, max_step(trap, drive), 30 * period, drive_amplitude=3 * trap.lambdabar)
print(f"gaussian, 3x amplitude: {tr.drive_cycles(omega):.2f} cycles ({tr.criterion})")

# m_j = -1 is pushed the other way: the trajectories mirror exactly
up = simulate(trap, DriveSpec(omega, 1), period / 100, 3 * period, stop_on_escape=False)
down = simulate(trap, DriveSpec(omega, -1), period / 100, 3 * period, stop_on_escape=False)
print("mirror residual:", np.max(np.abs(up.positions + down.positions)))
