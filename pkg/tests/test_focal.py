import math

import numpy as np
import pytest
from scipy.special import j1

from optical_magnus.fields import IncidentBeam
from optical_magnus.focal import (
    AIRY_FIRST_ZERO,
    FitFailed,
    FocalMap,
    axial_flux,
    focal_field,
    focal_field_grid,
    focal_map,
    spot_metrics,
    spot_radius_estimate,
)
from optical_magnus.radiometry import beam_power


def test_airy_constant():
    from scipy.special import jn_zeros

    assert AIRY_FIRST_ZERO == jn_zeros(1, 1)[0]


def test_grid_and_pointwise_agree():
    beam = IncidentBeam.gaussian(0.3)
    xs = np.linspace(-12, 12, 7)
    ys = np.linspace(-9, 9, 5)
    g = focal_field_grid(beam, xs, ys)
    X, Y = np.meshgrid(xs, ys)
    p = focal_field(beam, X, Y)
    np.testing.assert_allclose(g, p, atol=1e-13 * np.abs(p).max())


def test_on_axis_equals_spectrum_integral():
    beam = IncidentBeam.tophat(0.4)
    e0 = focal_field(beam, 0.0, 0.0)
    # integral of (cos t cos^2 p + sin^2 p) over the cap: pi (1 - cos r) + pi (1 - cos^2 r)/2
    r = 0.4
    expected = math.pi * (1 - math.cos(r)) + 0.5 * math.pi * (1 - math.cos(r) ** 2)
    assert e0[0].real == pytest.approx(expected, rel=1e-12)
    assert abs(e0[1]) < 1e-15 and abs(e0[2]) < 1e-15


def test_paraxial_gaussian_profile():
    w = 0.05
    beam = IncidentBeam.gaussian(w)
    rho = np.linspace(0, 3 / w, 13)
    ex = focal_field(beam, rho, 0 * rho)[:, 0]
    np.testing.assert_allclose((ex / ex[0]).real, np.exp(-(rho * w) ** 2 / 4), atol=3e-3)


def test_paraxial_airy_profile():
    r = 0.1
    beam = IncidentBeam.tophat(r)
    rho = np.linspace(1e-6, 6 / r, 13)
    ex = focal_field(beam, 0 * rho, rho)[:, 0]
    x = rho * math.sin(r)
    np.testing.assert_allclose((ex / ex[0]).real, 2 * j1(x) / x, atol=5e-3)


def test_gaussian_spot_radius():
    m = spot_metrics(focal_map(IncidentBeam.gaussian(0.2)))
    assert m.kind == "gauss"
    assert m.radius == pytest.approx(spot_radius_estimate(IncidentBeam.gaussian(0.2)), rel=0.02)
    assert m.residual < 0.01
    assert 0.9 < m.peak_ratio <= 1.0


def test_tophat_first_null():
    beam = IncidentBeam.tophat(0.3)
    m = spot_metrics(focal_map(beam))
    assert m.kind == "airy"
    assert m.radius == pytest.approx(AIRY_FIRST_ZERO / math.sin(0.3), rel=0.02)


def test_parseval_flux():
    beam = IncidentBeam.gaussian(0.3)
    assert axial_flux(beam) == pytest.approx(4 * math.pi**2 * beam_power(beam).numeric, rel=1e-9)


def test_magnetic_is_rotated_electric_on_axis():
    e, h = focal_field(IncidentBeam.gaussian(0.2), 0.0, 0.0, magnetic=True)
    # x-polarized light travelling along z carries H along y
    assert h[1].real == pytest.approx(e[0].real, rel=1e-3)


def test_under_resolved_map_rejected():
    beam = IncidentBeam.gaussian(0.2)
    with pytest.raises(ValueError, match="under-resolved"):
        spot_metrics(focal_map(beam, n=15))


def test_airy_needs_the_null_inside():
    beam = IncidentBeam.tophat(0.3)
    with pytest.raises(FitFailed):
        spot_metrics(focal_map(beam, extent=0.5 * spot_radius_estimate(beam), n=129))


def test_gauss_model_rejects_doughnut():
    xs = np.linspace(-4, 4, 65)
    X, Y = np.meshgrid(xs, xs)
    r2 = X**2 + Y**2
    field = np.zeros(r2.shape + (3,), complex)
    field[..., 0] = r2 * np.exp(-r2 / 2)
    with pytest.raises(FitFailed):
        spot_metrics(FocalMap(xs, xs, field), kind="gauss")


def test_component_and_kind_validation():
    fmap = FocalMap(np.linspace(-1, 1, 5), np.linspace(-1, 1, 5), np.ones((5, 5, 3), complex))
    with pytest.raises(ValueError):
        spot_metrics(fmap, component="y")
    with pytest.raises(ValueError):
        spot_metrics(fmap, kind="bessel")


def test_map_is_odd_sized_and_centred():
    fmap = focal_map(IncidentBeam.gaussian(0.4), n=64)
    assert len(fmap.x) == 65 and fmap.x[32] == 0.0
    assert fmap.intensity.shape == (65, 65)
