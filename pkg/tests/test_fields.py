import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from optical_magnus.fields import (
    Direction,
    Dipole,
    Gaussian,
    IncidentBeam,
    Tophat,
    bloch_phase,
    dipole_field,
    incident_field,
    polarization_vector,
    saturation,
    spherical_unit,
    unit_vector,
)

thetas = st.floats(0.0, math.pi)
phis = st.floats(0.0, 2 * math.pi)


def test_on_axis_vectors():
    np.testing.assert_allclose(unit_vector(0.0, 0.0), [0, 0, 1])
    np.testing.assert_allclose(polarization_vector(0.0, 1.3), [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(Direction(math.pi / 2, 0.0).unit_vector(), [1, 0, 0], atol=1e-15)


def test_polarization_in_xz_plane_tilts_with_u():
    # rotating z onto u about y carries x onto (cos t, 0, -sin t)
    t = 0.4
    np.testing.assert_allclose(polarization_vector(t, 0.0), [math.cos(t), 0, -math.sin(t)], atol=1e-15)


@given(thetas, phis)
def test_polarization_unit_and_transverse(theta, phi):
    e = polarization_vector(theta, phi)
    u = unit_vector(theta, phi)
    assert abs(np.linalg.norm(e) - 1) < 1e-14
    assert abs(e @ u) < 1e-14


@given(thetas, phis, st.sampled_from([1, -1]), st.floats(-5, 5), st.floats(-3, 3))
def test_dipole_field_transverse(theta, phi, sigma, detuning, kd):
    dip = Dipole(sigma, detuning, 0.7, kd)
    e = dipole_field(dip, theta, phi)
    assert abs(np.sum(e * unit_vector(theta, phi))) < 1e-14


def test_spherical_unit_handedness():
    np.testing.assert_allclose(spherical_unit(1), np.array([1, 0, -1j]) / math.sqrt(2))
    np.testing.assert_allclose(spherical_unit(-1), np.array([1, 0, 1j]) / math.sqrt(2))
    with pytest.raises(ValueError):
        spherical_unit(0)


def test_dipole_pattern_extremes():
    # |E|^2 = 1 - |u.p|^2: maximal along the rotation axis y, half in the dipole plane
    dip = Dipole(1, 0.0, 1.0)
    along_y = np.sum(np.abs(dipole_field(dip, math.pi / 2, math.pi / 2)) ** 2)
    along_z = np.sum(np.abs(dipole_field(dip, 0.0, 0.0)) ** 2)
    assert along_y == pytest.approx(1.0)
    assert along_z == pytest.approx(0.5)


def test_bloch_phase():
    assert bloch_phase(0.0) == pytest.approx(math.pi / 2)
    # cot(alpha) = -Delta
    for d in (-3.0, -0.5, 0.5, 3.0):
        a = bloch_phase(d)
        assert 0 < a < math.pi
        assert math.cos(a) / math.sin(a) == pytest.approx(-d)


def test_saturation():
    s, frac = saturation(2.0, 1.0)
    assert s == 1.0 and frac == 0.5
    with pytest.raises(ValueError):
        saturation(-1.0, 0.0)


def test_beam_profiles():
    g = Gaussian(0.2)
    assert g.profile(0.2) == pytest.approx(math.exp(-1))
    t = Tophat(0.3)
    np.testing.assert_array_equal(t.profile(np.array([0.0, 0.3, 0.3001])), [1, 1, 0])
    assert g.width == 0.2 and t.width == 0.3


@pytest.mark.parametrize("bad", [0.0, -0.1, math.pi / 2, 2.0])
def test_width_bounds(bad):
    with pytest.raises(ValueError, match="pi/2|0 <|width"):
        Gaussian(bad)
    with pytest.raises(ValueError):
        Tophat(bad)


def test_incident_field_scales_with_amplitude():
    b1 = IncidentBeam.gaussian(0.3)
    b2 = IncidentBeam.gaussian(0.3, amplitude=2.5)
    np.testing.assert_allclose(incident_field(b2, 0.2, 0.4), 2.5 * incident_field(b1, 0.2, 0.4))


def test_displacement_is_pure_phase():
    a = dipole_field(Dipole(1, 0.3, 1.0, 0.0), 0.7, 0.2)
    b = dipole_field(Dipole(1, 0.3, 1.0, 1.4), 0.7, 0.2)
    np.testing.assert_allclose(np.abs(a), np.abs(b), atol=1e-15)
    ratio = b[0] / a[0]
    assert ratio == pytest.approx(np.exp(-1.4j * math.sin(0.7) * math.cos(0.2)))


def test_dipole_validation():
    with pytest.raises(ValueError):
        Dipole(sigma=0)
    with pytest.raises(ValueError):
        Dipole(scattered_amplitude=-1.0)
