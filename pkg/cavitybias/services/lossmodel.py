# cavitybias/services/lossmodel.py
"""
Surface resistance, electrode loss, trapped-flux and quality-factor bookkeeping.
Linewidths are kappa/2pi in Hz throughout.
"""

import logging
from typing import Optional

import numpy as np

from ..domain.errors import InvalidInputError, UnsupportedModeError
from ..domain.models import (
    TE301,
    CavityGeometry,
    LossBudget,
    MaterialSpec,
    ModeIndex,
    QualityFactors,
    QualityLimit,
)
from .geometry import MU_0, geometry_factor, resonance_frequency

logger = logging.getLogger(__name__)

COPPER_CONDUCTIVITY = 5.8e7  # S/m at room temperature
ELECTRODE_LINEWIDTH_AT_COPPER = 121e3  # Hz, installed electrode pair in TE301
RESIDUAL_RESISTANCE_PER_MICROTESLA = 2.2e-9  # ohm / uT at 1 GHz


def surface_resistivity(conductivity: float, frequency: float) -> float:
    """R_s = sqrt(mu0 * omega / sigma) of a normal metal, in ohms."""
    if conductivity <= 0 or frequency <= 0:
        raise InvalidInputError(
            f"Conductivity and frequency must be positive, got sigma={conductivity}, nu={frequency}",
            module="lossmodel")
    return float(np.sqrt(MU_0 * 2.0 * np.pi * frequency / conductivity))


def trapped_flux_resistance(trapped_field: float, frequency: float) -> float:
    """Residual resistance of trapped vortices: 2.2 nOhm/uT * B * sqrt(nu/GHz)."""
    if trapped_field < 0:
        raise InvalidInputError(f"Trapped field must be non-negative, got {trapped_field}", module="lossmodel")
    if frequency <= 0:
        raise InvalidInputError(f"Frequency must be positive, got {frequency}", module="lossmodel")
    return RESIDUAL_RESISTANCE_PER_MICROTESLA * (trapped_field / 1e-6) * float(np.sqrt(frequency / 1e9))


def _require_calibrated_mode(mode: ModeIndex):
    if mode != TE301:
        raise UnsupportedModeError(f"Electrode loss scaling is calibrated for TE301 only, not {mode.label}",
                                   module="lossmodel")


def electrode_linewidth(conductivity: float, mode: ModeIndex = TE301) -> float:
    """
    Linewidth added by normal-conducting electrodes, 121 kHz * sqrt(5.8e7 S/m / sigma).

    Raises:
        UnsupportedModeError: For any mode other than TE301
    """
    _require_calibrated_mode(mode)
    if not conductivity > 0:
        raise InvalidInputError(f"Conductivity must be positive, got {conductivity}", module="lossmodel")
    if np.isinf(conductivity):
        return 0.0
    return ELECTRODE_LINEWIDTH_AT_COPPER * float(np.sqrt(COPPER_CONDUCTIVITY / conductivity))


def conductivity_from_linewidth(linewidth_increase: float, mode: ModeIndex = TE301) -> float:
    """Invert ``electrode_linewidth``: the electrode conductivity giving a measured linewidth increase."""
    _require_calibrated_mode(mode)
    if not linewidth_increase > 0:
        raise InvalidInputError(
            f"Linewidth increase must be positive, got {linewidth_increase} (non-dissipative or ill-posed)",
            module="lossmodel")
    return COPPER_CONDUCTIVITY * (ELECTRODE_LINEWIDTH_AT_COPPER / linewidth_increase) ** 2


def conductivity_from_rrr(rrr: float, room_temperature_conductivity: float = COPPER_CONDUCTIVITY) -> float:
    """Cryogenic conductivity of a metal with the given residual resistance ratio."""
    if rrr <= 0 or room_temperature_conductivity <= 0:
        raise InvalidInputError("RRR and room-temperature conductivity must be positive", module="lossmodel")
    return rrr * room_temperature_conductivity


def rrr_from_conductivity(conductivity: float, room_temperature_conductivity: float = COPPER_CONDUCTIVITY) -> float:
    if conductivity <= 0 or room_temperature_conductivity <= 0:
        raise InvalidInputError("Conductivities must be positive", module="lossmodel")
    return conductivity / room_temperature_conductivity


def material_conductivity(material: MaterialSpec) -> Optional[float]:
    """Conductivity of a normal-conducting material, None for superconductors."""
    if material.superconductor:
        return None
    if material.conductivity is not None:
        return material.conductivity
    return conductivity_from_rrr(material.rrr)


def quality_factors(frequency: float, linewidth: float, transmission_amplitude: float) -> QualityFactors:
    """
    Loaded and internal Q of a symmetrically coupled two-port cavity.

    Args:
        frequency: Resonance frequency in Hz
        linewidth: Total linewidth kappa/2pi in Hz
        transmission_amplitude: On-resonance |S21| in [0, 1)

    Returns:
        QualityFactors with loadedQ = nu/kappa and internalQ = loadedQ / (1 - |S21|)
    """
    if frequency <= 0 or linewidth <= 0:
        raise InvalidInputError("Frequency and linewidth must be positive", module="lossmodel")
    if transmission_amplitude < 0:
        raise InvalidInputError(f"Transmission amplitude must be non-negative, got {transmission_amplitude}",
                                module="lossmodel")
    if transmission_amplitude >= 1.0:
        raise InvalidInputError(f"Over-unity transmission amplitude {transmission_amplitude} rejected",
                                module="lossmodel")
    loaded = frequency / linewidth
    return QualityFactors(loaded_q=loaded, internal_q=loaded / (1.0 - transmission_amplitude))


def q_from_surface_resistance(geometry: CavityGeometry, mode: ModeIndex, resistance: float) -> QualityLimit:
    """Q = G / R for a uniform surface resistance; a zero resistance gives the untagged no-limit result."""
    if resistance < 0:
        raise InvalidInputError(f"Surface resistance must be non-negative, got {resistance}", module="lossmodel")
    g = geometry_factor(geometry, mode)
    if resistance == 0:
        return QualityLimit(limited=False, q=None, geometry_factor=g, resistance=0.0)
    return QualityLimit(limited=True, q=g / resistance, geometry_factor=g, resistance=resistance)


def trapped_flux_q_limit(geometry: CavityGeometry, mode: ModeIndex, trapped_field: float) -> QualityLimit:
    """Q limit G / R_res(B_trap, nu_mode); B_trap = 0 yields a no-limit result instead of infinity."""
    frequency = resonance_frequency(geometry, mode)
    resistance = trapped_flux_resistance(trapped_field, frequency)
    limit = q_from_surface_resistance(geometry, mode, resistance)
    if limit.limited:
        logger.info(f"{mode.label} Q limit at {trapped_field * 1e3:.3g} mT trapped field: {limit.q:.3e}")
    return limit


def loss_budget(geometry: CavityGeometry, mode: ModeIndex, base_linewidth: float, material: MaterialSpec,
                transmission_amplitude: float, frequency: Optional[float] = None) -> LossBudget:
    """
    Decompose a mode's linewidth into base, electrode, trapped-flux and coupling contributions.

    Args:
        geometry: Cavity geometry
        mode: Mode index
        base_linewidth: Internal wall and residual linewidth in Hz, taken from measurement
        material: Electrode material including the trapped field
        transmission_amplitude: On-resonance |S21| in [0, 1)
        frequency: Measured resonance frequency; the ideal-box value when omitted

    Returns:
        LossBudget whose components sum to the total linewidth
    """
    if base_linewidth < 0:
        raise InvalidInputError(f"Base linewidth must be non-negative, got {base_linewidth}", module="lossmodel")
    frequency = frequency or resonance_frequency(geometry, mode)

    conductivity = material_conductivity(material)
    electrode = 0.0 if conductivity is None else electrode_linewidth(conductivity, mode)

    limit = trapped_flux_q_limit(geometry, mode, material.trapped_field)
    trapped = frequency / limit.q if limit.limited else 0.0

    internal = base_linewidth + electrode + trapped
    if internal <= 0:
        raise InvalidInputError("Loss budget has no dissipation; internal linewidth is zero", module="lossmodel")
    factors = quality_factors(frequency, internal / (1.0 - transmission_amplitude), transmission_amplitude)
    total = frequency / factors.loaded_q
    coupling = total - internal

    budget = LossBudget(mode, frequency, base_linewidth, electrode, trapped, coupling, total,
                        factors.loaded_q, factors.internal_q)
    logger.info(f"Loss budget {mode.label}: total {total / 1e3:.2f} kHz, loaded Q {factors.loaded_q:.3e}")
    return budget
