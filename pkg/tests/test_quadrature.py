import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import sph_harm_y

from optical_magnus.quadrature import (
    MIN_NODES,
    NoConvergence,
    SphericalGrid,
    integrate,
    integrate_adaptive,
    integrate_many,
    integrate_vec3,
)


def test_full_sphere_solid_angle():
    g = SphericalGrid(4, 4)
    assert g.solid_angle == pytest.approx(4 * math.pi)
    assert math.fsum(g.weights.ravel()) == pytest.approx(4 * math.pi, rel=1e-15)


@given(st.floats(0.01, math.pi))
def test_cap_area(cap):
    g = SphericalGrid(6, 6, cap)
    assert integrate(lambda t, p: np.ones_like(t), g).real == pytest.approx(
        2 * math.pi * (1 - math.cos(cap)), rel=1e-13
    )


def test_weights_positive_nodes_inside():
    g = SphericalGrid(12, 10, 0.5)
    assert np.all(g.weights > 0)
    assert np.all((g.theta > 0) & (g.theta < 0.5))


def test_spherical_harmonics_orthonormal():
    n = 8
    g = SphericalGrid(n, 2 * n)
    for l in range(n):
        for m in range(-l, l + 1):
            val = integrate(lambda t, p: sph_harm_y(l, m, t, p) * np.conj(sph_harm_y(l, m, t, p)), g)
            assert val == pytest.approx(1.0, abs=1e-13)
            if l + 1 < n:
                off = integrate(lambda t, p: sph_harm_y(l, m, t, p) * np.conj(sph_harm_y(l + 1, m, t, p)), g)
                assert abs(off) < 1e-13


@settings(max_examples=50)
@given(st.integers(0, 15), st.integers(0, 6), st.integers(0, 6))
def test_monomials_exact(a, b, c):
    # int x^a y^b z^c dOmega is known in closed form via Gamma functions
    n = 12
    g = SphericalGrid(n, 2 * n)

    def f(t, p):
        return (np.sin(t) * np.cos(p)) ** b * (np.sin(t) * np.sin(p)) ** c * np.cos(t) ** a

    if a + b + c > 2 * n - 1 or b + c > 2 * n - 1:
        return
    got = integrate(f, g).real
    if a % 2 or b % 2 or c % 2:
        assert abs(got) < 1e-13
        return
    lg = math.lgamma
    beta = [(k + 1) / 2 for k in (a, b, c)]
    expected = 2 * math.exp(sum(lg(x) for x in beta) - lg(sum(beta)))
    assert got == pytest.approx(expected, rel=1e-12)


def test_vector_and_many():
    g = SphericalGrid(8, 8)
    v = integrate_vec3(lambda t, p: np.stack([np.cos(t) ** 2] * 3, -1), g)
    np.testing.assert_allclose(v, [4 * math.pi / 3] * 3, rtol=1e-14)
    m = integrate_many(lambda t, p: np.ones(t.shape + (2, 2)), g)
    assert m.shape == (2, 2)
    with pytest.raises(ValueError):
        integrate_vec3(lambda t, p: np.ones(t.shape + (2,)), g)


def test_adaptive_converges_on_smooth_peak():
    w = 0.1
    val, achieved, grid = integrate_adaptive(lambda t, p: np.exp(-(t / w) ** 2), 7 * w, 1e-12)
    ref = 2 * math.pi * quad(lambda t: math.exp(-(t / w) ** 2) * math.sin(t), 0, 7 * w, epsabs=0, epsrel=1e-13)[0]
    assert val.real == pytest.approx(ref, rel=1e-11)
    assert achieved < 1e-12 and grid.theta_max == 7 * w


def test_adaptive_budget_exhausted():
    with pytest.raises(NoConvergence):
        integrate_adaptive(lambda t, p: np.exp(-(t / 0.01) ** 2), 0.07, 1e-15, max_nodes=32)
    with pytest.raises(NoConvergence):
        integrate_adaptive(lambda t, p: np.ones_like(t), None, 1e-12, n_start=16, max_nodes=8)


def test_grid_validation():
    with pytest.raises(ValueError):
        SphericalGrid(MIN_NODES - 1, 8)
    with pytest.raises(ValueError):
        SphericalGrid(8, 8, 4.0)
    with pytest.raises(ValueError):
        integrate_adaptive(lambda t, p: t, None, 0.0)


def test_refined_doubles():
    g = SphericalGrid(8, 6, 0.4).refined()
    assert (g.n_theta, g.n_phi, g.theta_max) == (16, 12, 0.4)
