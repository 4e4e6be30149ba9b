"""Focal-plane field synthesized from the angular spectrum.

``E(x, y, 0) = k^2 * integral E(Omega) exp(i k (u_x x + u_y y)) dOmega`` over
the incident half space. Each plane-wave component carries its transverse
phase; at the origin this reduces to the plain solid-angle integral. Lengths
are in units of 1/k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq, curve_fit

from .fields import IncidentBeam, Tophat, incident_field, unit_vector
from .quadrature import SphericalGrid
from .radiometry import support_cap

AIRY_FIRST_ZERO = 3.8317059702075125
_CHUNK = 2**22  # complex entries per synthesis block


class FitFailed(RuntimeError):
    """Spot model does not describe the map (residual above 10% of the peak)."""


def _synthesis_grid(beam: IncidentBeam, rho_max: float) -> SphericalGrid:
    cap = support_cap(beam)
    band = rho_max * math.sin(cap)
    n_phi = int(2 * math.ceil((band + 24) / 2)) + 8
    n_theta = max(48, int(math.ceil(0.75 * band)) + 32)
    return SphericalGrid(n_theta, n_phi, cap)


def _spectrum(beam: IncidentBeam, grid: SphericalGrid, magnetic: bool):
    theta, phi = grid.mesh()
    u = unit_vector(theta, phi).reshape(-1, 3)
    e = incident_field(beam, theta, phi).reshape(-1, 3) * grid.weights.reshape(-1, 1)
    return u, e, (np.cross(u, e) if magnetic else None)


def focal_field(beam: IncidentBeam, x, y, magnetic: bool = False, grid: SphericalGrid | None = None):
    """Field in the focal plane at points ``(x, y)`` (broadcast together).

    Returns the electric field with a trailing axis of length 3; with
    ``magnetic=True`` also the magnetic field ``u x E`` (Z0 = 1) synthesized
    the same way.
    """
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    if grid is None:
        grid = _synthesis_grid(beam, float(np.max(np.hypot(x, y), initial=0.0)))
    u, e, h = _spectrum(beam, grid, magnetic)

    pts = np.stack([x.ravel(), y.ravel()], axis=-1)
    out_e = np.empty((pts.shape[0], 3), complex)
    out_h = np.empty((pts.shape[0], 3), complex) if magnetic else None
    step = max(1, _CHUNK // u.shape[0])
    for i in range(0, pts.shape[0], step):
        p = pts[i : i + step]
        phase = np.exp(1j * (p[:, :1] * u[None, :, 0] + p[:, 1:] * u[None, :, 1]))
        out_e[i : i + step] = phase @ e
        if magnetic:
            out_h[i : i + step] = phase @ h
    shape = x.shape + (3,)
    if magnetic:
        return out_e.reshape(shape), out_h.reshape(shape)
    return out_e.reshape(shape)


def focal_field_grid(beam: IncidentBeam, xs, ys, magnetic: bool = False):
    """Focal field on the Cartesian product ``ys x xs``, shape ``(ny, nx, 3)``.

    Same values as :func:`focal_field`, computed by factorizing the phase
    ``exp(i x u_x) exp(i y u_y)`` into two matrix products.
    """
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    rho = math.hypot(np.max(np.abs(xs), initial=0.0), np.max(np.abs(ys), initial=0.0))
    grid = _synthesis_grid(beam, rho)
    u, e, h = _spectrum(beam, grid, magnetic)
    px = np.exp(1j * np.outer(u[:, 0], xs))  # (N, nx)
    py = np.exp(1j * np.outer(ys, u[:, 1]))  # (ny, N)

    def synth(spec):
        return np.stack([py @ (spec[:, c : c + 1] * px) for c in range(3)], axis=-1)

    if magnetic:
        return synth(e), synth(h)
    return synth(e)


def spot_radius_estimate(beam: IncidentBeam) -> float:
    """Paraxial spot size: ``2 / w_theta`` (Gaussian 1/e^2) or the Airy first zero."""
    shape = beam.shape
    if isinstance(shape, Tophat):
        return AIRY_FIRST_ZERO / math.sin(shape.r_theta)
    return 2.0 / shape.w_theta


@dataclass(frozen=True)
class FocalMap:
    x: np.ndarray
    y: np.ndarray
    field: np.ndarray  # shape (len(y), len(x), 3)
    beam: IncidentBeam | None = None

    @property
    def intensity(self) -> np.ndarray:
        return np.sum(np.abs(self.field) ** 2, axis=-1)

    @property
    def spacing(self) -> float:
        return float(self.x[1] - self.x[0])


def focal_map(beam: IncidentBeam, extent: float | None = None, n: int | None = None) -> FocalMap:
    """Sample the focal field on a square grid centred on the axis.

    Defaults: half-width of four spot radii and an odd sample count of at
    least 129, so the axis itself is a sample point.
    """
    if extent is None:
        extent = 4.0 * spot_radius_estimate(beam)
    if n is None:
        n = 129
    if n % 2 == 0:
        n += 1
    xs = np.linspace(-extent, extent, n)
    return FocalMap(xs, xs.copy(), focal_field_grid(beam, xs, xs), beam)


@dataclass(frozen=True)
class SpotMetrics:
    radius: float
    peak_ratio: float
    residual: float
    kind: str


def _gauss(r2, a, w):
    return a * np.exp(-2.0 * r2 / w**2)


def spot_metrics(fmap: FocalMap, kind: str | None = None, component: str = "x") -> SpotMetrics:
    """Spot size of a focal map.

    ``kind="gauss"`` fits ``A exp(-2 r^2 / W^2)`` by least squares and reports
    the 1/e^2 radius ``W``. ``kind="airy"`` locates the first zero of the field
    along the y axis, where only the x component survives. ``component``
    selects the intensity that is fitted: ``"x"`` (co-polarized) or ``"total"``.

    ``peak_ratio`` is the peak intensity over the in-phase bound
    ``(integral |E(Omega)| dOmega)^2``; it needs ``fmap.beam``.
    """
    if kind is None:
        kind = "airy" if fmap.beam is not None and isinstance(fmap.beam.shape, Tophat) else "gauss"
    if component == "x":
        inten = np.abs(fmap.field[..., 0]) ** 2
    elif component == "total":
        inten = fmap.intensity
    else:
        raise ValueError(f"unknown component {component!r}")
    peak = float(inten.max())

    if kind == "gauss":
        X, Y = np.meshgrid(fmap.x, fmap.y)
        r2 = (X**2 + Y**2).ravel()
        guess_w = math.sqrt(float(np.sum(inten.ravel() * r2) / np.sum(inten)) * 2.0)
        try:
            (a, w), _ = curve_fit(_gauss, r2, inten.ravel(), p0=[peak, guess_w])
        except RuntimeError as exc:
            raise FitFailed(str(exc)) from exc
        radius = abs(float(w))
        residual = float(np.max(np.abs(_gauss(r2, a, w) - inten.ravel()))) / peak
    elif kind == "airy":
        iy = len(fmap.x) // 2
        if not np.isclose(fmap.x[iy], 0.0, atol=1e-12 * max(1.0, fmap.x[-1])):
            raise ValueError("map must have a sample column on the axis")
        col = fmap.field[:, iy, 0].real
        j0 = len(fmap.y) // 2
        r = fmap.y[j0:]
        vals = col[j0:] / col[j0]
        sign_change = np.nonzero(np.diff(np.sign(vals)) != 0)[0]
        if sign_change.size == 0:
            raise FitFailed("no zero of the field along the y axis inside the map")
        spline = CubicSpline(r, vals)
        k = sign_change[0]
        radius = float(brentq(spline, r[k], r[k + 1]))
        residual = 0.0
    else:
        raise ValueError(f"unknown spot kind {kind!r}")

    if residual > 0.1:
        raise FitFailed(f"fit residual {residual:.1%} of peak")
    if fmap.spacing > radius / 8:
        raise ValueError(f"map under-resolved: spacing {fmap.spacing:.3g} > radius/8")

    ratio = math.nan
    if fmap.beam is not None:
        grid = _synthesis_grid(fmap.beam, 0.0)
        th, ph = grid.mesh()
        mag = np.sqrt(np.sum(np.abs(incident_field(fmap.beam, th, ph)) ** 2, axis=-1))
        bound = float(np.sum(mag * grid.weights)) ** 2
        ratio = float(fmap.intensity.max()) / bound
    return SpotMetrics(radius, ratio, residual, kind)


def axial_flux(beam: IncidentBeam, extent: float | None = None, n: int = 129) -> float:
    """Focal-plane integral of the z Poynting flux ``Re(E x H*)_z / 2``.

    By Parseval this equals ``(2 pi)^2`` times the beam power (k = 1), up to
    truncation of the map.
    """
    if extent is None:
        extent = 4.0 * spot_radius_estimate(beam)
    xs = np.linspace(-extent, extent, n)
    e, h = focal_field_grid(beam, xs, xs, magnetic=True)
    sz = 0.5 * np.real(e[..., 0] * np.conj(h[..., 1]) - e[..., 1] * np.conj(h[..., 0]))
    dx = xs[1] - xs[0]
    return float(np.sum(sz) * dx * dx)
