# cavitybias/services/geometry.py
"""
Analytic TE_m0l modes of the ideal rectangular cavity.
"""

import logging
from typing import Dict, List, Tuple

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT, mu_0 as MU_0

from ..domain.errors import InvalidInputError, UnsupportedModeError
from ..domain.models import CavityGeometry, ModeField, ModeIndex

logger = logging.getLogger(__name__)

IMPEDANCE_OF_FREE_SPACE = MU_0 * SPEED_OF_LIGHT


def validate_mode(mode: ModeIndex) -> None:
    """Reject modes outside the TE_m0l family."""
    if mode.m == 0 and mode.n == 0 and mode.l == 0:
        raise InvalidInputError("Mode index (0, 0, 0) is not a cavity mode", module="geometry")
    if mode.n != 0:
        raise UnsupportedModeError(f"{mode.label} is outside the supported TE_m0l family (n must be 0)",
                                   module="geometry")
    if mode.m < 1 or mode.l < 1:
        raise InvalidInputError(f"{mode.label} has more than one vanishing mode number", module="geometry")


def wavenumbers(geometry: CavityGeometry, mode: ModeIndex) -> Tuple[float, float, float]:
    """(kx, kz, k) of a TE_m0l mode in rad/m."""
    validate_mode(mode)
    kx = mode.m * np.pi / geometry.lx
    kz = mode.l * np.pi / geometry.lz
    return kx, kz, float(np.hypot(kx, kz))


def resonance_frequency(geometry: CavityGeometry, mode: ModeIndex) -> float:
    """
    Ideal-box eigenfrequency of a TE_m0l mode.

    Args:
        geometry: Cavity geometry
        mode: Mode index with n = 0

    Returns:
        Resonance frequency in Hz

    Raises:
        InvalidInputError: If the mode index is all-zero or degenerate
        UnsupportedModeError: If the mode is outside the TE_m0l family
    """
    validate_mode(mode)
    return 0.5 * SPEED_OF_LIGHT * float(np.sqrt(
        (mode.m / geometry.lx) ** 2 + (mode.n / geometry.ly) ** 2 + (mode.l / geometry.lz) ** 2))


def mode_field(field: ModeField, position) -> Dict[str, np.ndarray]:
    """
    Evaluate E and c*B of a TE_m0l mode, normalized to peak |E| = 1.

    E is along y; B lies in the x-z plane. ``position`` may be a single 3-vector or an array of
    shape (..., 3); the returned arrays have the same leading shape.

    Raises:
        InvalidInputError: If any position lies outside the box
    """
    geometry, mode = field.geometry, field.mode
    kx, kz, k = wavenumbers(geometry, mode)
    r = np.asarray(position, dtype=float)
    if r.shape[-1] != 3:
        raise InvalidInputError(f"Positions must have a trailing dimension of 3, got {r.shape}", module="geometry")
    dims = geometry.dimensions
    tol = 1e-12 * float(dims.max())
    if np.any(r < -tol) or np.any(r > dims + tol):
        raise InvalidInputError("Position lies outside the cavity", module="geometry")

    x, z = r[..., 0], r[..., 2]
    sx, cx = np.sin(kx * x), np.cos(kx * x)
    sz, cz = np.sin(kz * z), np.cos(kz * z)
    zeros = np.zeros_like(x)

    e = np.stack([zeros, sx * sz, zeros], axis=-1)
    cb = np.stack([-(kz / k) * sx * cz, zeros, (kx / k) * cx * sz], axis=-1)
    return {"E": e, "B": cb}


def node_planes(mode: ModeIndex, geometry: CavityGeometry) -> List[float]:
    """Interior planes x = k*Lx/m on which the mode's E field vanishes."""
    validate_mode(mode)
    return [k * geometry.lx / mode.m for k in range(1, mode.m)]


def _gauss_legendre(a: float, b: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * t + 0.5 * (a + b), 0.5 * (b - a) * w


def geometry_factor(geometry: CavityGeometry, mode: ModeIndex, points_per_axis: int = None) -> float:
    """
    G = omega*mu0 * integral |H|^2 dV / surface integral |H|^2 dS by Gauss-Legendre quadrature.

    Holes, electrodes and the rod port are ignored. Q = G / R_s for a uniform surface resistance.

    Args:
        geometry: Cavity geometry
        mode: TE_m0l mode
        points_per_axis: Quadrature order per axis; defaults to one exact for the mode's trig products

    Returns:
        Geometry factor in ohms
    """
    validate_mode(mode)
    n = points_per_axis or 2 * max(mode.m, mode.l) + 8
    field = ModeField(mode, geometry)
    lx, ly, lz = geometry.lx, geometry.ly, geometry.lz
    xs, wxs = _gauss_legendre(0.0, lx, n)
    ys, wys = _gauss_legendre(0.0, ly, n)
    zs, wzs = _gauss_legendre(0.0, lz, n)

    grid = np.stack(np.meshgrid(xs, ys, zs, indexing="ij"), axis=-1)
    cb = mode_field(field, grid)["B"]
    weights = wxs[:, None, None] * wys[None, :, None] * wzs[None, None, :]
    volume_integral = float(np.sum(weights * np.sum(cb ** 2, axis=-1)))

    surface_integral = 0.0
    faces = (
        (0, (ys, wys), (zs, wzs), (0.0, lx)),
        (1, (xs, wxs), (zs, wzs), (0.0, ly)),
        (2, (xs, wxs), (ys, wys), (0.0, lz)),
    )
    for normal, (u, wu), (v, wv), positions in faces:
        uu, vv = np.meshgrid(u, v, indexing="ij")
        w2 = wu[:, None] * wv[None, :]
        for position in positions:
            coords = [None, None, None]
            coords[normal] = np.full_like(uu, position)
            tangential = [axis for axis in range(3) if axis != normal]
            coords[tangential[0]], coords[tangential[1]] = uu, vv
            b = mode_field(field, np.stack(coords, axis=-1))["B"]
            surface_integral += float(np.sum(w2 * np.sum(b[..., tangential] ** 2, axis=-1)))

    omega = 2.0 * np.pi * resonance_frequency(geometry, mode)
    # c*B stands in for H up to a common factor that cancels in the ratio
    return omega * MU_0 * volume_integral / surface_integral


def geometry_factor_closed_form(geometry: CavityGeometry, mode: ModeIndex) -> float:
    """Closed-form geometry factor of a TE_m0l mode (reduces to the textbook TE_10l result)."""
    kx, kz, k = wavenumbers(geometry, mode)
    lx, ly, lz = geometry.lx, geometry.ly, geometry.lz
    surface = kx ** 2 * ly * lz + kz ** 2 * lx * ly + 0.5 * k ** 2 * lx * lz
    return IMPEDANCE_OF_FREE_SPACE * k ** 3 * geometry.volume / (4.0 * surface)


def mode_table(geometry: CavityGeometry, modes: List[ModeIndex],
               with_geometry_factor: bool = True) -> List[Dict[str, object]]:
    """Frequency, node planes and (optionally) geometry factor of each mode."""
    rows = []
    for mode in modes:
        rows.append({
            "mode": mode.label,
            "m": mode.m, "n": mode.n, "l": mode.l,
            "frequency_Hz": resonance_frequency(geometry, mode),
            "node_planes_m": node_planes(mode, geometry),
            "geometry_factor_ohm": geometry_factor(geometry, mode) if with_geometry_factor else None,
        })
        logger.info(f"{mode.label}: {rows[-1]['frequency_Hz'] / 1e9:.4f} GHz")
    return rows
