# cavitybias/domain/spectro_models.py
"""
Domain models for Rydberg spectroscopy and cavity transmission.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from .errors import InvalidInputError

# 444 MHz/(V/cm)^2 expressed in Hz/(V/m)^2
DEFAULT_POLARIZABILITY_DIFFERENCE = -444e6 / 1e4


@dataclass(frozen=True)
class RydbergSystem:
    """Microwave transition between Rydberg states probed by the cavity field."""
    field_free_frequency: float = 20.542e9
    offset_plus: float = -2.5e6
    offset_minus: float = -0.5e6
    polarizability_difference: float = DEFAULT_POLARIZABILITY_DIFFERENCE
    g_l: float = 1.0
    homogeneous_width: float = 1.0e6
    paschen_back_threshold: float = 3e-4  # tesla

    def __post_init__(self):
        if self.homogeneous_width <= 0:
            raise InvalidInputError(f"Homogeneous width must be positive, got {self.homogeneous_width}",
                                    module="spectro")
        if self.field_free_frequency <= 0:
            raise InvalidInputError("Field-free frequency must be positive", module="spectro")
        for offset in (self.offset_plus, self.offset_minus):
            if abs(offset) > 1e-3 * self.field_free_frequency:
                raise InvalidInputError(f"Zero-field offset {offset} Hz is not small relative to the transition",
                                        module="spectro")

    def with_width(self, homogeneous_width: float) -> "RydbergSystem":
        return RydbergSystem(self.field_free_frequency, self.offset_plus, self.offset_minus,
                             self.polarizability_difference, self.g_l, homogeneous_width,
                             self.paschen_back_threshold)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "field_free_frequency_Hz": self.field_free_frequency,
            "offset_plus_Hz": self.offset_plus,
            "offset_minus_Hz": self.offset_minus,
            "polarizability_difference_Hz_per_V2m2": self.polarizability_difference,
            "g_l": self.g_l,
            "homogeneous_width_Hz": self.homogeneous_width,
            "paschen_back_threshold_T": self.paschen_back_threshold,
        }


@dataclass(frozen=True)
class TransitionFrequencies:
    """Absolute frequencies of the two Zeeman components."""
    nu_plus: float
    nu_minus: float
    stark_shift: float
    zeeman_shift: float
    unresolved_regime: bool = False

    @property
    def splitting(self) -> float:
        return self.nu_plus - self.nu_minus

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nu_plus_Hz": self.nu_plus,
            "nu_minus_Hz": self.nu_minus,
            "stark_shift_Hz": self.stark_shift,
            "zeeman_shift_Hz": self.zeeman_shift,
            "unresolved_regime": self.unresolved_regime,
        }


@dataclass(eq=False)
class SpectralLine:
    """Signal sampled on a detuning grid relative to ``reference_frequency``."""
    detuning: np.ndarray
    signal: np.ndarray
    reference_frequency: float = 0.0
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.detuning = np.asarray(self.detuning, dtype=float)
        self.signal = np.asarray(self.signal, dtype=float)
        if self.detuning.shape != self.signal.shape or self.detuning.ndim != 1:
            raise InvalidInputError("Detuning grid and signal must be 1-D arrays of equal length", module="spectro")
        if not np.all(np.isfinite(self.signal)):
            raise InvalidInputError("Spectral signal contains non-finite values", module="spectro")
        if np.any(np.diff(self.detuning) <= 0):
            raise InvalidInputError("Detuning grid must be strictly increasing", module="spectro")

    @property
    def frequencies(self) -> np.ndarray:
        return self.reference_frequency + self.detuning


@dataclass(frozen=True)
class LineFit:
    """
    Result of a one- or two-Gaussian fit. Centers are detunings from the line's reference frequency.
    When ``resolved`` is False only ``center_plus``/``amplitude_plus`` carry the single-peak fit.
    """
    center_plus: float
    center_minus: Optional[float]
    sigma: float
    amplitude_plus: float
    amplitude_minus: Optional[float]
    baseline: float
    resolved: bool
    reference_frequency: float = 0.0
    reduced_chi_square: Optional[float] = None
    stderr: Dict[str, Optional[float]] = field(default_factory=dict)

    @property
    def fwhm(self) -> float:
        return 2.0 * np.sqrt(2.0 * np.log(2.0)) * self.sigma

    @property
    def splitting(self) -> Optional[float]:
        if not self.resolved:
            return None
        return self.center_plus - self.center_minus

    def to_dict(self) -> Dict[str, Any]:
        return {
            "resolved": self.resolved,
            "center_plus_Hz": self.center_plus,
            "center_minus_Hz": self.center_minus,
            "sigma_Hz": self.sigma,
            "fwhm_Hz": self.fwhm,
            "amplitude_plus": self.amplitude_plus,
            "amplitude_minus": self.amplitude_minus,
            "baseline": self.baseline,
            "reference_frequency_Hz": self.reference_frequency,
            "reduced_chi_square": self.reduced_chi_square,
            "stderr": dict(self.stderr),
        }


@dataclass(frozen=True)
class BroadeningResult:
    field_broadening: float
    relative_inhomogeneity: float

    def to_dict(self) -> Dict[str, Any]:
        return {"sigma_field_Hz": self.field_broadening, "relative_inhomogeneity": self.relative_inhomogeneity}


@dataclass(frozen=True)
class CalibrationPoint:
    """Coil current with the fitted splitting and, optionally, both fitted line centers."""
    current: float
    splitting: float
    center_plus: Optional[float] = None
    center_minus: Optional[float] = None
    uncertainty: Optional[float] = None


@dataclass(frozen=True)
class CalibrationResult:
    gauss_per_ampere: float
    gauss_per_ampere_stderr: float
    offset_plus: Optional[float]
    offset_minus: Optional[float]
    offset_difference: float
    n_points: int
    method: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gauss_per_ampere": self.gauss_per_ampere,
            "gauss_per_ampere_stderr": self.gauss_per_ampere_stderr,
            "offset_plus_Hz": self.offset_plus,
            "offset_minus_Hz": self.offset_minus,
            "offset_difference_Hz": self.offset_difference,
            "n_points": self.n_points,
            "method": self.method,
        }


@dataclass(eq=False)
class TransmissionTrace:
    """Transmission amplitude sampled on a probe-detuning grid."""
    detuning: np.ndarray
    amplitude: np.ndarray
    drive_power: Optional[float] = None
    temperature: Optional[float] = None
    center_frequency: Optional[float] = None

    def __post_init__(self):
        self.detuning = np.asarray(self.detuning, dtype=float)
        self.amplitude = np.asarray(self.amplitude, dtype=float)
        if self.detuning.shape != self.amplitude.shape or self.detuning.ndim != 1:
            raise InvalidInputError("Detuning and amplitude must be 1-D arrays of equal length", module="txn")
        if not (np.all(np.isfinite(self.detuning)) and np.all(np.isfinite(self.amplitude))):
            raise InvalidInputError("Transmission trace contains non-finite values", module="txn")
        if np.any(np.diff(self.detuning) <= 0):
            raise InvalidInputError("Detuning grid must be strictly increasing", module="txn")


@dataclass(frozen=True)
class LorentzianFit:
    center: float
    linewidth: float
    peak_amplitude: float
    reduced_chi_square: Optional[float] = None
    stderr: Dict[str, Optional[float]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "center_Hz": self.center,
            "linewidth_Hz": self.linewidth,
            "peak_amplitude": self.peak_amplitude,
            "reduced_chi_square": self.reduced_chi_square,
            "stderr": dict(self.stderr),
        }


@dataclass(frozen=True)
class PhotonSweepPoint:
    photon_number: float
    drive_power: float
    fitted_linewidth: float

    def to_dict(self) -> Dict[str, Any]:
        return {"photon_number": self.photon_number, "drive_power_W": self.drive_power,
                "linewidth_Hz": self.fitted_linewidth}
