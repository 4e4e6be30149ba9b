"""Where the transverse force vanishes: one reduced wavelength off axis.

Run: python demos/02_equilibrium.py
"""
import numpy as np

from optical_magnus import IncidentBeam, equilibrium_displacement, scan

beam = IncidentBeam.gaussian(0.2)

# force along x as the atom is moved across the focus
table = scan(beam, "displacement", -0.5, 2.0, 11, sigma=1, detuning=1.0)
for kd, f in zip(table["kd"], table["force_x_numeric"]):
    print(f"kd={kd:+.2f}  F_x={f:+.3e} P/c")

# the root does not depend on the detuning and flips side with the handedness
for d in (-2.0, -0.5, 0.5, 2.0):
    plus = equilibrium_displacement(beam, d, 1)
    minus = equilibrium_displacement(beam, d, -1)
    print(f"Delta={d:+.1f}  kd*(+)={plus:.5f}  kd*(-)={minus:.5f}")

# same story for a flat-top beam
print("tophat:", np.round([equilibrium_displacement(IncidentBeam.tophat(0.2), d) for d in (-1.0, 1.0)], 5))
