"""Focal spots synthesized from the angular spectrum.

Run: python demos/04_focal_spots.py
"""
import math

from optical_magnus import IncidentBeam, focal_map, spot_metrics
from optical_magnus.focal import AIRY_FIRST_ZERO, axial_flux
from optical_magnus.radiometry import beam_power

# Gaussian spectra focus to Gaussian spots of radius 2/(k w)
for w in (0.05, 0.1, 0.2, 0.4):
    m = spot_metrics(focal_map(IncidentBeam.gaussian(w)))
    print(f"w={w:.2f}  radius*w = {m.radius * w:.4f} (paraxial 2)  residual {m.residual:.1e}")

# flat-top spectra give Airy disks
for r in (0.1, 0.3, 0.6):
    m = spot_metrics(focal_map(IncidentBeam.tophat(r)))
    print(f"r={r:.1f}  first null {m.radius:.3f}/k, paraxial {AIRY_FIRST_ZERO / math.sin(r):.3f}/k")

# the flux through the focal plane is the beam power times (2 pi)^2
beam = IncidentBeam.gaussian(0.3)
print("flux / (4 pi^2 P) =", axial_flux(beam) / (4 * math.pi**2 * beam_power(beam).numeric))
