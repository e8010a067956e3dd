# cavitybias/services/txn.py
"""
Cavity transmission model, Lorentzian fitting, photon number and thermal occupation.

Rates are given as kappa/2pi in Hz; the photon-number conversion works in angular units internally.
The symmetric two-port convention is used: |S21(D)| = kappa_ext / sqrt(D^2 + (kappa/2)^2) with
kappa_ext the coupling rate of one port.
"""

import logging
from typing import List, Optional, Sequence

import lmfit
import numpy as np
from scipy.constants import h, k as k_B

from ..domain.errors import FitError, InvalidInputError
from ..domain.spectro_models import LorentzianFit, PhotonSweepPoint, TransmissionTrace

logger = logging.getLogger(__name__)

MIN_TRACE_SAMPLES = 15
MIN_SPAN_LINEWIDTHS = 3.0


def _validate_rates(kappa: float, kappa_ext: float):
    if kappa <= 0:
        raise InvalidInputError(f"Linewidth must be positive, got {kappa}", module="txn")
    if kappa_ext < 0:
        raise InvalidInputError(f"Coupling rate must be non-negative, got {kappa_ext}", module="txn")
    if 2.0 * kappa_ext > kappa * (1.0 + 1e-12):
        raise InvalidInputError(
            f"Coupling rate {kappa_ext} exceeds kappa/2 = {kappa / 2}; unphysical for a symmetric two-port cavity",
            module="txn")


def s21_model(kappa: float, kappa_ext: float, detuning):
    """Transmission amplitude |S21| at ``detuning`` (scalar or array, Hz)."""
    _validate_rates(kappa, kappa_ext)
    detuning = np.asarray(detuning, dtype=float)
    amplitude = kappa_ext / np.sqrt(detuning ** 2 + (kappa / 2.0) ** 2)
    return float(amplitude) if amplitude.ndim == 0 else amplitude


def lorentzian_power(x, center, linewidth, peak):
    """Power Lorentzian with full width at half maximum ``linewidth``."""
    half = linewidth / 2.0
    return peak * half ** 2 / ((x - center) ** 2 + half ** 2)


class LorentzianPowerModel(lmfit.model.Model):
    __doc__ = "squared-amplitude Lorentzian model" + lmfit.models.COMMON_INIT_DOC

    def __init__(self, *args, **kwargs):
        super().__init__(lorentzian_power, *args, **kwargs)
        self.set_param_hint('linewidth', min=0)
        self.set_param_hint('peak', min=0)

    def guess(self, data, x=None, **kwargs):
        if x is None:
            return None
        peak_index = int(np.argmax(data))
        peak = float(data[peak_index])
        linewidth = half_maximum_width(x, data)
        params = self.make_params(center=float(x[peak_index]), linewidth=linewidth, peak=peak)
        params[f'{self.prefix}center'].set(min=float(x.min()), max=float(x.max()))
        return lmfit.models.update_param_vals(params, self.prefix, **kwargs)


def half_maximum_width(x: np.ndarray, power: np.ndarray) -> float:
    """Full width at half maximum from linear interpolation of both half-maximum crossings."""
    peak_index = int(np.argmax(power))
    half = power[peak_index] / 2.0
    below = np.nonzero(power < half)[0]
    left = below[below < peak_index]
    right = below[below > peak_index]
    if left.size == 0 or right.size == 0:
        raise InvalidInputError("Trace does not fall below half maximum on both sides; span too narrow",
                                module="txn")
    i, j = left[-1], right[0]
    x_left = np.interp(half, [power[i], power[i + 1]], [x[i], x[i + 1]])
    x_right = np.interp(half, [power[j], power[j - 1]], [x[j], x[j - 1]])
    return float(x_right - x_left)


def fit_lorentzian(trace: TransmissionTrace) -> LorentzianFit:
    """
    Fit the squared-amplitude Lorentzian to a transmission trace.

    Args:
        trace: Amplitude trace with at least 15 samples spanning at least 3 linewidths

    Returns:
        LorentzianFit with center, power FWHM linewidth and peak amplitude

    Raises:
        InvalidInputError: If the trace is too short or too narrow
        FitError: If the least-squares fit does not converge
    """
    if trace.detuning.size < MIN_TRACE_SAMPLES:
        raise InvalidInputError(f"Trace has {trace.detuning.size} samples, at least {MIN_TRACE_SAMPLES} required",
                                module="txn")
    power = trace.amplitude ** 2
    guess_width = half_maximum_width(trace.detuning, power)

    # fit in units of the guessed linewidth
    x = trace.detuning / guess_width
    model = LorentzianPowerModel()
    params = model.guess(power, x=x)
    result = model.fit(power, params, x=x, fit_kws={'xtol': 1e-14, 'ftol': 1e-14})
    if not result.success or not np.all(np.isfinite(list(result.best_values.values()))):
        raise FitError(f"Lorentzian fit did not converge: {result.message}", module="txn",
                       residual=float(np.sqrt(result.chisqr)))

    center = result.params['center'].value * guess_width
    linewidth = result.params['linewidth'].value * guess_width
    peak = float(np.sqrt(result.params['peak'].value))
    span = float(trace.detuning[-1] - trace.detuning[0])
    if span < MIN_SPAN_LINEWIDTHS * linewidth:
        raise InvalidInputError(
            f"Trace spans {span / linewidth:.2f} linewidths, at least {MIN_SPAN_LINEWIDTHS} required",
            module="txn")

    def stderr(name, scale):
        value = result.params[name].stderr
        return None if value is None else float(value * scale)

    fit = LorentzianFit(
        center=float(center), linewidth=float(linewidth), peak_amplitude=peak,
        reduced_chi_square=float(result.redchi),
        stderr={"center_Hz": stderr('center', guess_width), "linewidth_Hz": stderr('linewidth', guess_width)},
    )
    logger.info(f"Lorentzian fit: linewidth {fit.linewidth / 1e3:.3f} kHz, center {fit.center:.1f} Hz")
    return fit


def normalize_trace(trace: TransmissionTrace, fit: Optional[LorentzianFit] = None) -> TransmissionTrace:
    """Scale a trace so its fitted peak amplitude is 1."""
    fit = fit or fit_lorentzian(trace)
    return TransmissionTrace(trace.detuning, trace.amplitude / fit.peak_amplitude, trace.drive_power,
                             trace.temperature, trace.center_frequency)


def synthesize_trace(kappa: float, kappa_ext: float, detuning: Sequence[float], noise: float = 0.0,
                     seed: Optional[int] = None, normalize: bool = True, **metadata) -> TransmissionTrace:
    """
    Model trace with optional additive Gaussian noise relative to the peak amplitude.

    Args:
        kappa: Linewidth kappa/2pi in Hz
        kappa_ext: Per-port coupling rate kappa_ext/2pi in Hz
        detuning: Probe detunings in Hz
        noise: Noise standard deviation as a fraction of the peak
        seed: Seed for the noise generator; required when noise > 0
        normalize: Divide by the model peak so the noiseless peak is 1
    """
    amplitude = s21_model(kappa, kappa_ext, detuning)
    peak = 2.0 * kappa_ext / kappa
    if normalize:
        if peak == 0:
            raise InvalidInputError("Cannot normalize a trace with zero coupling", module="txn")
        amplitude = amplitude / peak
        peak = 1.0
    if noise > 0:
        if seed is None:
            raise InvalidInputError("A seed is required for noisy traces", module="txn")
        rng = np.random.default_rng(seed)
        amplitude = amplitude + noise * peak * rng.standard_normal(amplitude.shape)
    return TransmissionTrace(np.asarray(detuning, dtype=float), amplitude, **metadata)


def photon_number(drive_power: float, frequency: float, kappa: float, kappa_ext: float,
                  detuning: float = 0.0) -> float:
    """Mean intra-cavity photon number n = kappa_ext * P / (h nu) / (D^2 + kappa^2/4), rates angular."""
    if drive_power < 0:
        raise InvalidInputError(f"Drive power must be non-negative, got {drive_power}", module="txn")
    if frequency <= 0 or kappa <= 0 or kappa_ext <= 0:
        raise InvalidInputError("Frequency, linewidth and coupling rate must be positive", module="txn")
    two_pi = 2.0 * np.pi
    photon_flux = two_pi * kappa_ext * drive_power / (h * frequency)
    return float(photon_flux / ((two_pi * detuning) ** 2 + (two_pi * kappa) ** 2 / 4.0))


def drive_power_for_photon_number(n_photons: float, frequency: float, kappa: float, kappa_ext: float,
                                  detuning: float = 0.0) -> float:
    """Drive power giving ``n_photons``; inverse of ``photon_number``."""
    if n_photons < 0:
        raise InvalidInputError(f"Photon number must be non-negative, got {n_photons}", module="txn")
    return n_photons / photon_number(1.0, frequency, kappa, kappa_ext, detuning)


def thermal_occupation(temperature: float, frequency: float) -> float:
    """Bose-Einstein occupation 1 / (exp(h nu / k_B T) - 1); zero at T = 0."""
    if temperature < 0:
        raise InvalidInputError(f"Temperature must be non-negative, got {temperature}", module="txn")
    if frequency <= 0:
        raise InvalidInputError(f"Frequency must be positive, got {frequency}", module="txn")
    if temperature == 0:
        return 0.0
    return float(1.0 / np.expm1(h * frequency / (k_B * temperature)))


def linewidth_vs_photon_number(photon_numbers: Sequence[float], frequency: float, kappa: float, kappa_ext: float,
                               detuning: Sequence[float], noise: float = 0.0,
                               seed: Optional[int] = None) -> List[PhotonSweepPoint]:
    """
    Fitted linewidth across intra-cavity photon numbers.

    The loss model has no power-dependent term, so the fitted linewidth is flat in n_c up to noise.
    Noisy sweeps need a seed.
    """
    if noise > 0 and seed is None:
        raise InvalidInputError("A seed is required for a noisy photon-number sweep", module="txn")
    children = np.random.SeedSequence(seed).spawn(len(photon_numbers)) if noise > 0 else [None] * len(photon_numbers)
    points = []
    for n_c, child in zip(photon_numbers, children):
        power = drive_power_for_photon_number(n_c, frequency, kappa, kappa_ext)
        child_seed = None if child is None else int(child.generate_state(1)[0])
        trace = synthesize_trace(kappa, kappa_ext, detuning, noise=noise, seed=child_seed,
                                 drive_power=power, center_frequency=frequency)
        points.append(PhotonSweepPoint(float(n_c), power, fit_lorentzian(trace).linewidth))
    return points
