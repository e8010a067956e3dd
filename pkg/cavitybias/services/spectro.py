# cavitybias/services/spectro.py
"""
Rydberg transition frequencies under dc fields, cloud-averaged line synthesis, line fitting
and Zeeman calibration.
"""

import logging
from typing import Dict, List, Optional, Sequence

import lmfit
import numpy as np
from scipy.constants import mu_0, physical_constants
from scipy.signal import find_peaks, peak_widths

from ..domain.errors import FitError, InvalidInputError
from ..domain.models import CloudSpec, FieldMap
from ..domain.spectro_models import (
    BroadeningResult,
    CalibrationPoint,
    CalibrationResult,
    LineFit,
    RydbergSystem,
    SpectralLine,
    TransitionFrequencies,
)

logger = logging.getLogger(__name__)

BOHR_MAGNETON_HZ_PER_TESLA = physical_constants["Bohr magneton in Hz/T"][0]
GAUSS = 1e-4  # tesla
FWHM_PER_SIGMA = 2.0 * np.sqrt(2.0 * np.log(2.0))
MIN_CLOUD_SAMPLES = 1000
CHUNK_SIZE = 4096
MIN_LINE_SAMPLES = 20
FIT_FREQUENCY_UNIT = 1e6  # lines are fitted in MHz


def stark_shift(system: RydbergSystem, e_field):
    """Quadratic Stark shift -|d_alpha| E^2 / 2 in Hz for a field magnitude in V/m."""
    return -0.5 * abs(system.polarizability_difference) * np.square(e_field)


def zeeman_shift(system: RydbergSystem, b_field):
    """Paschen-Back shift mu_B g_L B / h in Hz."""
    return BOHR_MAGNETON_HZ_PER_TESLA * system.g_l * np.asarray(b_field, dtype=float)


def transition_frequencies(system: RydbergSystem, e_field: float, b_field: float) -> TransitionFrequencies:
    """
    Frequencies of the two Zeeman components in dc fields.

    nu_(+-1) = nu0 + offset_(+-1) +- mu_B g_L B / h + Stark shift, with the same Stark shift on both lines.

    Args:
        system: Transition parameters
        e_field: Electric field magnitude in V/m
        b_field: Magnetic field magnitude in tesla

    Returns:
        TransitionFrequencies; tagged ``unresolved_regime`` for 0 < B below the Paschen-Back threshold
    """
    if e_field < 0:
        raise InvalidInputError(f"Electric field magnitude must be non-negative, got {e_field}", module="spectro")
    if b_field < 0:
        raise InvalidInputError(f"Magnetic field magnitude must be non-negative, got {b_field}", module="spectro")
    stark = float(stark_shift(system, e_field))
    zeeman = float(zeeman_shift(system, b_field))
    unresolved = 0.0 < b_field < system.paschen_back_threshold
    if unresolved:
        logger.warning(f"B = {b_field / GAUSS:.2f} G is below the Paschen-Back threshold; "
                       f"frequencies are tagged unresolved")
    nu0 = system.field_free_frequency
    return TransitionFrequencies(
        nu_plus=nu0 + system.offset_plus + zeeman + stark,
        nu_minus=nu0 + system.offset_minus - zeeman + stark,
        stark_shift=stark,
        zeeman_shift=zeeman,
        unresolved_regime=unresolved,
    )


def field_from_stark_shift(system: RydbergSystem, shift: float) -> float:
    """Electric field magnitude in V/m producing a (non-positive) Stark shift in Hz."""
    if shift > 0:
        raise InvalidInputError(f"Stark shifts are negative, got {shift}", module="spectro")
    return float(np.sqrt(-2.0 * shift / abs(system.polarizability_difference)))


def helmholtz_field_per_ampere(radius: float, turns: int = 1) -> float:
    """Center field of an ideal Helmholtz pair in tesla per ampere."""
    if radius <= 0 or turns < 1:
        raise InvalidInputError("Coil radius and turn count must be positive", module="spectro")
    return (4.0 / 5.0) ** 1.5 * mu_0 * turns / radius


def detuning_grid(start: float, stop: float, n_points: int) -> np.ndarray:
    if n_points < 2 or stop <= start:
        raise InvalidInputError("Detuning grid needs stop > start and at least two points", module="spectro")
    return np.linspace(start, stop, n_points)


def _gaussian_profile(x: np.ndarray, centers: np.ndarray, sigma: float) -> np.ndarray:
    return np.exp(-0.5 * ((x[None, :] - centers[:, None]) / sigma) ** 2).sum(axis=0)


def synthesize_spectrum(system: RydbergSystem, field_map: FieldMap, b_field: float, cloud: CloudSpec,
                        detuning: Sequence[float], seed: int, n_samples: int = 20000,
                        magnetic_map: Optional[FieldMap] = None) -> SpectralLine:
    """
    Monte Carlo spectral line of a uniform atom cloud in an inhomogeneous electric field.

    Every sampled atom contributes one Gaussian of width sigma_h per Zeeman component at its local
    transition frequencies. Samples are drawn in fixed-size chunks from independent child seeds, so
    the line is bit-identical for a given seed.

    Args:
        system: Transition parameters
        field_map: Electric field map covering the cloud
        b_field: Magnetic field at the cloud center in tesla
        cloud: Cloud ball diameter and offset from the map center
        detuning: Frequency grid in Hz relative to the field-free frequency
        seed: Random seed
        n_samples: Number of sampled atoms (at least 1000)
        magnetic_map: Optional solved magnetostatic map giving the spatial profile of B

    Returns:
        SpectralLine normalized to peak 1

    Raises:
        InvalidInputError: If the cloud extends outside the map or the sampling is too small
    """
    if field_map.kind != "electric":
        raise InvalidInputError("synthesize_spectrum needs an electric field map", module="spectro")
    if seed is None:
        raise InvalidInputError("A seed is required for Monte Carlo line synthesis", module="spectro")
    if n_samples < MIN_CLOUD_SAMPLES:
        raise InvalidInputError(f"At least {MIN_CLOUD_SAMPLES} cloud samples are required, got {n_samples}",
                                module="spectro")
    if b_field < 0:
        raise InvalidInputError(f"Magnetic field magnitude must be non-negative, got {b_field}", module="spectro")
    detuning = np.asarray(detuning, dtype=float)

    center = cloud.center_in(field_map)
    if not cloud.fits_in(field_map):
        raise InvalidInputError("Cloud extends outside the field map", module="spectro")

    b_profile_center = None
    if magnetic_map is not None:
        if magnetic_map.kind != "magnetic":
            raise InvalidInputError("magnetic_map must be a magnetic field map", module="spectro")
        if not cloud.fits_in(magnetic_map):
            raise InvalidInputError("Cloud extends outside the magnetic map", module="spectro")
        b_profile_center = float(np.linalg.norm(magnetic_map.sample(cloud.center_in(magnetic_map))))
        if b_profile_center == 0:
            raise InvalidInputError("Magnetic map vanishes at the cloud center", module="spectro")

    n_chunks = -(-n_samples // CHUNK_SIZE)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    signal = np.zeros_like(detuning)
    sigma_h = system.homogeneous_width
    for index, child in enumerate(children):
        count = min(CHUNK_SIZE, n_samples - index * CHUNK_SIZE)
        rng = np.random.default_rng(child)
        displacements = cloud.draw(rng, count)
        e_local = np.linalg.norm(field_map.sample(center + displacements), axis=-1)
        if magnetic_map is None:
            b_local = np.full(count, b_field)
        else:
            b_points = cloud.center_in(magnetic_map) + displacements
            b_local = b_field * np.linalg.norm(magnetic_map.sample(b_points), axis=-1) / b_profile_center
        stark = stark_shift(system, e_local)
        zeeman = zeeman_shift(system, b_local)
        signal += _gaussian_profile(detuning, system.offset_plus + zeeman + stark, sigma_h)
        signal += _gaussian_profile(detuning, system.offset_minus - zeeman + stark, sigma_h)

    peak = signal.max()
    if peak <= 0:
        raise InvalidInputError("Synthesized line has no weight on the detuning grid", module="spectro")
    provenance = {
        "seed": int(seed),
        "n_samples": int(n_samples),
        "b_field_T": float(b_field),
        "unresolved_regime": bool(0 < b_field < system.paschen_back_threshold),
        "cloud": cloud.to_dict(),
        "electric_field_center_V_per_m": float(np.linalg.norm(field_map.sample(field_map.center))),
        "magnetic_profile": magnetic_map is not None,
        "homogeneous_width_Hz": sigma_h,
    }
    logger.info(f"Synthesized line at B = {b_field / GAUSS:.2f} G from {n_samples} atoms")
    return SpectralLine(detuning, signal / peak, system.field_free_frequency, provenance)


def single_gaussian(x, center, sigma, amplitude, baseline):
    return baseline + amplitude * np.exp(-0.5 * ((x - center) / sigma) ** 2)


def double_gaussian(x, center_plus, center_minus, sigma, amplitude_plus, amplitude_minus, baseline):
    return (baseline
            + amplitude_plus * np.exp(-0.5 * ((x - center_plus) / sigma) ** 2)
            + amplitude_minus * np.exp(-0.5 * ((x - center_minus) / sigma) ** 2))


def _peak_guesses(x: np.ndarray, data: np.ndarray):
    """Positions, heights and Gaussian widths of up to two highest local maxima."""
    span = float(data.max() - data.min())
    peaks, _ = find_peaks(data, prominence=0.05 * span if span > 0 else None)
    if peaks.size == 0:
        peaks = np.array([int(np.argmax(data))])
    peaks = peaks[np.argsort(data[peaks])[::-1][:2]]
    dx = float(np.mean(np.diff(x)))
    widths = peak_widths(data, peaks, rel_height=0.5)[0] * dx / FWHM_PER_SIGMA
    return x[peaks], data[peaks], np.maximum(widths, dx)


class SingleGaussianModel(lmfit.model.Model):
    __doc__ = "Gaussian line on a constant baseline" + lmfit.models.COMMON_INIT_DOC

    def __init__(self, *args, **kwargs):
        super().__init__(single_gaussian, *args, **kwargs)
        self.set_param_hint('sigma', min=0)
        self.set_param_hint('amplitude', min=0)

    def guess(self, data, x=None, **kwargs):
        if x is None:
            return None
        centers, heights, widths = _peak_guesses(x, data)
        baseline = float(np.min(data))
        params = self.make_params(center=float(centers[0]), sigma=float(widths[0]),
                                  amplitude=float(heights[0]) - baseline, baseline=baseline)
        params[f'{self.prefix}center'].set(min=float(x.min()), max=float(x.max()))
        return lmfit.models.update_param_vals(params, self.prefix, **kwargs)


class DoubleGaussianModel(lmfit.model.Model):
    __doc__ = "two Gaussians with a common width on a constant baseline" + lmfit.models.COMMON_INIT_DOC

    def __init__(self, *args, **kwargs):
        super().__init__(double_gaussian, *args, **kwargs)
        self.set_param_hint('sigma', min=0)
        self.set_param_hint('amplitude_plus', min=0)
        self.set_param_hint('amplitude_minus', min=0)

    def guess(self, data, x=None, **kwargs):
        if x is None:
            return None
        centers, heights, widths = _peak_guesses(x, data)
        baseline = float(np.min(data))
        if centers.size == 2:
            sigma = float(widths.min())
            high, low = sorted(centers, reverse=True)
            amp_high, amp_low = (heights if centers[0] >= centers[1] else heights[::-1]) - baseline
        else:
            # one visible maximum: start from two halves of it
            sigma = float(widths[0]) / 2.0
            high, low = centers[0] + sigma, centers[0] - sigma
            amp_high = amp_low = (float(heights[0]) - baseline) / 2.0
        params = self.make_params(center_plus=float(high), center_minus=float(low), sigma=sigma,
                                  amplitude_plus=float(amp_high), amplitude_minus=float(amp_low),
                                  baseline=baseline)
        for name in ('center_plus', 'center_minus'):
            params[f'{self.prefix}{name}'].set(min=float(x.min()), max=float(x.max()))
        return lmfit.models.update_param_vals(params, self.prefix, **kwargs)


def _stderr(result, name: str) -> Optional[float]:
    value = result.params[name].stderr
    return None if value is None else float(value) * FIT_FREQUENCY_UNIT


def _fit_single(line: SpectralLine, x: np.ndarray) -> LineFit:
    model = SingleGaussianModel()
    result = model.fit(line.signal, model.guess(line.signal, x=x), x=x)
    values = result.params
    if not result.success or not np.isfinite(values['sigma'].value) or values['sigma'].value <= 0:
        raise FitError(f"Single-Gaussian fit did not converge: {result.message}", module="spectro",
                       residual=float(np.sqrt(result.chisqr)))
    return LineFit(
        center_plus=values['center'].value * FIT_FREQUENCY_UNIT,
        center_minus=None,
        sigma=values['sigma'].value * FIT_FREQUENCY_UNIT,
        amplitude_plus=values['amplitude'].value,
        amplitude_minus=None,
        baseline=values['baseline'].value,
        resolved=False,
        reference_frequency=line.reference_frequency,
        reduced_chi_square=float(result.redchi),
        stderr={"center_Hz": _stderr(result, 'center'), "sigma_Hz": _stderr(result, 'sigma')},
    )


def _fit_double(line: SpectralLine, x: np.ndarray, allow_resolved: bool = True) -> Optional[LineFit]:
    model = DoubleGaussianModel()
    try:
        result = model.fit(line.signal, model.guess(line.signal, x=x), x=x)
    except (ValueError, np.linalg.LinAlgError) as e:
        logger.warning(f"Double-Gaussian fit failed: {str(e)}")
        return None
    values = result.params
    if not result.success or not np.isfinite(values['sigma'].value) or values['sigma'].value <= 0:
        return None

    c1, c2 = values['center_plus'].value, values['center_minus'].value
    a1, a2 = values['amplitude_plus'].value, values['amplitude_minus'].value
    names = ('center_plus', 'center_minus')
    if c2 > c1:
        c1, c2, a1, a2 = c2, c1, a2, a1
        names = names[::-1]
    sigma = values['sigma'].value
    resolved = allow_resolved and (c1 - c2) > FWHM_PER_SIGMA * sigma
    return LineFit(
        center_plus=c1 * FIT_FREQUENCY_UNIT,
        center_minus=c2 * FIT_FREQUENCY_UNIT,
        sigma=sigma * FIT_FREQUENCY_UNIT,
        amplitude_plus=a1,
        amplitude_minus=a2,
        baseline=values['baseline'].value,
        resolved=bool(resolved),
        reference_frequency=line.reference_frequency,
        reduced_chi_square=float(result.redchi),
        stderr={"center_plus_Hz": _stderr(result, names[0]), "center_minus_Hz": _stderr(result, names[1]),
                "sigma_Hz": _stderr(result, 'sigma')},
    )


def fit_spectrum(line: SpectralLine, model: str = "auto") -> LineFit:
    """
    Fit a spectral line with two Gaussians of common width plus a baseline.

    The two-peak fit is reported only when the peak separation exceeds the FWHM; otherwise a
    single Gaussian is fitted and ``resolved`` is False. Lines synthesized below the Paschen-Back
    threshold are never reported as resolved.

    Args:
        line: Spectral line with at least 20 samples
        model: "auto", "double" (report the two-peak fit regardless) or "single"

    Returns:
        LineFit with the higher-frequency center as ``center_plus``

    Raises:
        FitError: If the fit does not converge
    """
    if line.detuning.size < MIN_LINE_SAMPLES:
        raise InvalidInputError(f"Line has {line.detuning.size} samples, at least {MIN_LINE_SAMPLES} required",
                                module="spectro")
    if model not in ("auto", "double", "single"):
        raise InvalidInputError(f"Unknown line model {model!r}", module="spectro")
    x = line.detuning / FIT_FREQUENCY_UNIT
    below_threshold = bool(line.provenance.get("unresolved_regime", False))
    if below_threshold:
        logger.warning("Line lies below the Paschen-Back threshold; reporting it as unresolved")

    if model != "single":
        double = _fit_double(line, x, allow_resolved=not below_threshold)
        if double is not None and (double.resolved or model == "double"):
            logger.info(f"Resolved line: splitting {double.splitting / 1e6 if double.resolved else 0:.3f} MHz, "
                        f"sigma {double.sigma / 1e6:.3f} MHz")
            return double
        if double is None and model == "double":
            raise FitError("Double-Gaussian fit did not converge", module="spectro")

    single = _fit_single(line, x)
    logger.info(f"Unresolved line: sigma {single.sigma / 1e6:.3f} MHz")
    return single


def broadening_analysis(sigma_at_field: float, sigma_at_zero: float, stark_shift_value: float) -> BroadeningResult:
    """
    Field-induced width by quadrature subtraction and the relative field inhomogeneity.

    sigma_E = sqrt(sigma(E)^2 - sigma(0)^2) and sigma_E / (2 |d_nu|) for a quadratic Stark shift d_nu.
    """
    if sigma_at_zero <= 0:
        raise InvalidInputError("Zero-field width must be positive", module="spectro")
    if sigma_at_field < sigma_at_zero:
        raise InvalidInputError(
            f"Width at field {sigma_at_field} is below the zero-field width {sigma_at_zero}; "
            f"non-physical deconvolution", module="spectro")
    if stark_shift_value == 0:
        raise InvalidInputError("Stark shift must be non-zero", module="spectro")
    field_width = float(np.sqrt(sigma_at_field ** 2 - sigma_at_zero ** 2))
    return BroadeningResult(field_width, field_width / (2.0 * abs(stark_shift_value)))


def linear_calibration_fit(points: List[CalibrationPoint], system: Optional[RydbergSystem] = None) -> CalibrationResult:
    """
    Weighted linear fit of Zeeman splittings against coil current.

    With both line centers on every point the two zero-field intercepts and the slope are fitted jointly;
    otherwise splitting = offset difference + 2 mu_B g_L (slope * I) / h is fitted.

    Args:
        points: At least three calibration points
        system: Transition parameters providing g_L

    Returns:
        CalibrationResult with the slope in G/A

    Raises:
        InvalidInputError: For fewer than three points or rank-deficient data
    """
    system = system or RydbergSystem()
    if len(points) < 3:
        raise InvalidInputError(f"Calibration needs at least 3 points, got {len(points)}", module="spectro")
    per_tesla = float(zeeman_shift(system, 1.0))
    currents = np.array([p.current for p in points], dtype=float)
    if all(p.uncertainty for p in points):
        weights = 1.0 / np.array([p.uncertainty for p in points]) ** 2
    else:
        weights = np.ones(len(points))

    joint = all(p.center_plus is not None and p.center_minus is not None for p in points)
    if joint:
        n = len(points)
        design = np.zeros((2 * n, 3))
        design[:n, 0] = 1.0
        design[n:, 1] = 1.0
        design[:n, 2] = per_tesla * currents
        design[n:, 2] = -per_tesla * currents
        target = np.concatenate([[p.center_plus for p in points], [p.center_minus for p in points]])
        row_weights = np.concatenate([weights, weights])
    else:
        design = np.column_stack([np.ones(len(points)), 2.0 * per_tesla * currents])
        target = np.array([p.splitting for p in points], dtype=float)
        row_weights = weights

    root = np.sqrt(row_weights)
    a = design * root[:, None]
    y = target * root
    solution, _, rank, _ = np.linalg.lstsq(a, y, rcond=None)
    if rank < design.shape[1]:
        raise InvalidInputError("Calibration data are rank-deficient (need distinct currents)", module="spectro")
    residual = y - a @ solution
    dof = a.shape[0] - a.shape[1]
    variance = float(residual @ residual) / dof if dof > 0 else 0.0
    covariance = variance * np.linalg.inv(a.T @ a)
    slope = float(solution[-1])
    slope_stderr = float(np.sqrt(max(covariance[-1, -1], 0.0)))

    if joint:
        offsets: Dict[str, Optional[float]] = {"plus": float(solution[0]), "minus": float(solution[1])}
        difference = offsets["plus"] - offsets["minus"]
    else:
        offsets = {"plus": None, "minus": None}
        difference = float(solution[0])

    result = CalibrationResult(
        gauss_per_ampere=slope / GAUSS,
        gauss_per_ampere_stderr=slope_stderr / GAUSS,
        offset_plus=offsets["plus"],
        offset_minus=offsets["minus"],
        offset_difference=difference,
        n_points=len(points),
        method="joint" if joint else "splitting",
    )
    logger.info(f"Coil calibration: {result.gauss_per_ampere:.3f}({result.gauss_per_ampere_stderr:.3f}) G/A "
                f"from {len(points)} points")
    return result
