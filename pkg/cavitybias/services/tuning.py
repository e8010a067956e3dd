# cavitybias/services/tuning.py
"""
Frequency tuning by rod insertion, from first-order cavity perturbation theory.
"""

import logging
from typing import List, Sequence

import numpy as np

from ..domain.errors import InvalidInputError
from ..domain.models import CavityGeometry, ModeField, ModeIndex, RodInsertion, TuningShift
from .geometry import mode_field, resonance_frequency

logger = logging.getLogger(__name__)

NON_PERTURBATIVE_THRESHOLD = 0.05


class RodQuadrature:
    """Polar midpoint rule over a cylinder along x: radial x angular x axial cells."""

    def __init__(self, n_radial: int = 16, n_angular: int = 32, n_axial: int = 40):
        self.n_radial = n_radial
        self.n_angular = n_angular
        self.n_axial = n_axial

    @property
    def n_points(self) -> int:
        return self.n_radial * self.n_angular * self.n_axial

    def points(self, geometry: CavityGeometry, rod: RodInsertion):
        """Sample positions (N, 3) and volume weights (N,) of the inserted rod section."""
        radius = rod.diameter / 2.0
        y0, z0 = rod_center(geometry, rod)
        depth = rod.insertion_depth

        dr = radius / self.n_radial
        dtheta = 2.0 * np.pi / self.n_angular
        ds = depth / self.n_axial
        r = (np.arange(self.n_radial) + 0.5) * dr
        theta = (np.arange(self.n_angular) + 0.5) * dtheta
        s = (np.arange(self.n_axial) + 0.5) * ds
        rr, tt, ss = np.meshgrid(r, theta, s, indexing="ij")

        x = ss if rod.face == "xmin" else geometry.lx - ss
        y = y0 + rr * np.cos(tt)
        z = z0 + rr * np.sin(tt)
        points = np.stack([x, y, z], axis=-1).reshape(-1, 3)
        weights = (rr * dr * dtheta * ds).reshape(-1)
        return points, weights


def rod_center(geometry: CavityGeometry, rod: RodInsertion):
    if rod.center is not None:
        return rod.center
    if geometry.rod_port is not None:
        return geometry.rod_port.center
    return (geometry.ly / 2.0, geometry.lz / 2.0)


def _validate_rod(geometry: CavityGeometry, rod: RodInsertion):
    if rod.insertion_depth > geometry.lx:
        raise InvalidInputError(f"Insertion depth {rod.insertion_depth} exceeds Lx = {geometry.lx}", module="tuning")
    port = geometry.rod_port
    if port is not None and rod.diameter >= port.diameter:
        raise InvalidInputError(f"Rod diameter {rod.diameter} must be below the port diameter {port.diameter}",
                                module="tuning")
    y0, z0 = rod_center(geometry, rod)
    radius = rod.diameter / 2.0
    if not (radius <= y0 <= geometry.ly - radius and radius <= z0 <= geometry.lz - radius):
        raise InvalidInputError("Rod cross-section extends outside the cavity", module="tuning")


def perturbation_shift(geometry: CavityGeometry, mode: ModeIndex, rod: RodInsertion,
                       quadrature: RodQuadrature = None) -> TuningShift:
    """
    First-order frequency shift from a rod inserted along x.

    Dielectric rod: d_nu/nu = -integral (eps_r - 1) |E|^2 dV / integral (|E|^2 + c^2|B|^2) dV,
    with field components transverse to the rod reduced by 2/(eps_r + 1) when ``rod.depolarize``.
    Conducting rod: d_nu/nu = +integral (c^2|B|^2 - |E|^2) dV over the same denominator.

    Args:
        geometry: Cavity geometry
        mode: TE_m0l mode
        rod: Rod material, diameter and insertion depth
        quadrature: Sampling rule over the rod volume

    Returns:
        TuningShift; ``non_perturbative`` is set when |d_nu/nu| exceeds 5%
    """
    _validate_rod(geometry, rod)
    frequency = resonance_frequency(geometry, mode)
    if rod.insertion_depth == 0:
        return TuningShift(0.0, frequency, 0.0, False)

    quadrature = quadrature or RodQuadrature()
    points, weights = quadrature.points(geometry, rod)
    fields = mode_field(ModeField(mode, geometry), points)
    e2_axial = fields["E"][:, 0] ** 2
    e2_transverse = fields["E"][:, 1] ** 2 + fields["E"][:, 2] ** 2
    b2 = np.sum(fields["B"] ** 2, axis=-1)

    # peak-normalized TE_m0l fields store V/4 in each of the electric and magnetic energies
    stored = geometry.volume / 2.0

    if rod.material == "dielectric":
        chi = rod.permittivity - 1.0
        transverse_factor = 2.0 * chi / (rod.permittivity + 1.0) if rod.depolarize else chi
        integrand = chi * e2_axial + transverse_factor * e2_transverse
        relative = -float(np.dot(weights, integrand)) / stored
    else:
        relative = float(np.dot(weights, b2 - e2_axial - e2_transverse)) / stored

    non_perturbative = abs(relative) > NON_PERTURBATIVE_THRESHOLD
    if non_perturbative:
        logger.warning(f"Rod at depth {rod.insertion_depth * 1e3:.2f} mm shifts {mode.label} by "
                       f"{relative:.1%}; outside the perturbative regime")
    return TuningShift(rod.insertion_depth, frequency, relative * frequency, non_perturbative)


def tuning_curve(geometry: CavityGeometry, mode: ModeIndex, rod: RodInsertion,
                 depths: Sequence[float]) -> List[TuningShift]:
    """Frequency shift for each insertion depth."""
    curve = [perturbation_shift(geometry, mode, rod.at_depth(float(depth))) for depth in depths]
    if curve:
        logger.info(f"Tuning curve {rod.material} rod: {len(curve)} depths, "
                    f"max |shift| {max(abs(p.shift) for p in curve) / 1e6:.2f} MHz")
    return curve
