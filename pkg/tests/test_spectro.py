# tests/test_spectro.py
import numpy as np
import pytest

from cavitybias.domain.errors import InvalidInputError
from cavitybias.domain.models import CloudSpec, Region
from cavitybias.domain.spectro_models import CalibrationPoint, RydbergSystem, SpectralLine
from cavitybias.services.fieldsolve import field_statistics
from cavitybias.services.spectro import (
    GAUSS,
    broadening_analysis,
    detuning_grid,
    double_gaussian,
    field_from_stark_shift,
    fit_spectrum,
    helmholtz_field_per_ampere,
    linear_calibration_fit,
    stark_shift,
    synthesize_spectrum,
    transition_frequencies,
    zeeman_shift,
)

SYSTEM = RydbergSystem()
CLOUD = CloudSpec(1.1e-3, (0.7e-3, 0.0, 0.0))
DETUNING = detuning_grid(-30e6, 25e6, 551)


def test_stark_and_zeeman_shifts():
    assert stark_shift(SYSTEM, 10.0) == pytest.approx(-2.22e6, rel=1e-3)
    assert zeeman_shift(SYSTEM, 7.2 * GAUSS) == pytest.approx(10.08e6, rel=1e-3)
    assert field_from_stark_shift(SYSTEM, -0.4e6) == pytest.approx(4.24, rel=2e-3)
    with pytest.raises(InvalidInputError):
        field_from_stark_shift(SYSTEM, 1e6)


def test_transition_frequencies():
    lines = transition_frequencies(SYSTEM, 10.0, 7.2 * GAUSS)
    assert lines.splitting == pytest.approx(SYSTEM.offset_plus - SYSTEM.offset_minus + 2 * lines.zeeman_shift)
    assert lines.nu_plus == pytest.approx(SYSTEM.field_free_frequency - 2.5e6 + 10.08e6 - 2.22e6, abs=2e4)
    assert not lines.unresolved_regime
    assert transition_frequencies(SYSTEM, 0.0, 1.0 * GAUSS).unresolved_regime
    assert not transition_frequencies(SYSTEM, 0.0, 0.0).unresolved_regime
    with pytest.raises(InvalidInputError):
        transition_frequencies(SYSTEM, -1.0, 0.0)


def test_helmholtz_field_scales_with_turns():
    assert helmholtz_field_per_ampere(0.3, 10) == pytest.approx(10 * helmholtz_field_per_ampere(0.3))
    assert helmholtz_field_per_ampere(0.3) == pytest.approx(3.0e-6, rel=2e-3)


def test_synthesis_is_deterministic_per_seed(uniform_map):
    field_map = uniform_map(10.0)
    first = synthesize_spectrum(SYSTEM, field_map, 7.2 * GAUSS, CLOUD, DETUNING, seed=11, n_samples=2000)
    again = synthesize_spectrum(SYSTEM, field_map, 7.2 * GAUSS, CLOUD, DETUNING, seed=11, n_samples=2000)
    assert np.array_equal(first.signal, again.signal)
    assert first.signal.max() == pytest.approx(1.0)
    assert first.provenance["seed"] == 11


def test_synthesis_rejects_bad_inputs(uniform_map):
    field_map = uniform_map(10.0)
    with pytest.raises(InvalidInputError):
        synthesize_spectrum(SYSTEM, field_map, 0.0, CLOUD, DETUNING, seed=1, n_samples=10)
    with pytest.raises(InvalidInputError):
        synthesize_spectrum(SYSTEM, field_map, 0.0, CloudSpec(12e-3), DETUNING, seed=1)
    with pytest.raises(InvalidInputError):
        synthesize_spectrum(SYSTEM, uniform_map(1e-4, kind="magnetic"), 0.0, CLOUD, DETUNING, seed=1)


def test_resolved_doublet_in_uniform_field(uniform_map):
    line = synthesize_spectrum(SYSTEM, uniform_map(0.0), 7.2 * GAUSS, CLOUD, DETUNING, seed=5, n_samples=2000)
    fit = fit_spectrum(line)
    zeeman = zeeman_shift(SYSTEM, 7.2 * GAUSS)
    assert fit.resolved
    assert fit.center_plus == pytest.approx(SYSTEM.offset_plus + zeeman, abs=2e4)
    assert fit.center_minus == pytest.approx(SYSTEM.offset_minus - zeeman, abs=2e4)
    assert fit.sigma == pytest.approx(SYSTEM.homogeneous_width, rel=0.01)
    assert fit.splitting == pytest.approx(SYSTEM.offset_plus - SYSTEM.offset_minus + 2 * zeeman, abs=4e4)


@pytest.mark.parametrize("b_gauss", [1.0, 2.0, 2.5, 2.9])
def test_doublet_below_threshold_is_reported_unresolved(uniform_map, b_gauss):
    line = synthesize_spectrum(SYSTEM, uniform_map(0.0), b_gauss * GAUSS, CLOUD, DETUNING, seed=5, n_samples=2000)
    fit = fit_spectrum(line)
    assert not fit.resolved
    assert fit.splitting is None
    assert fit.center_minus is None


def test_single_model_on_gaussian_line():
    x = np.linspace(-20e6, 20e6, 401)
    signal = 0.02 + np.exp(-0.5 * ((x - 1.5e6) / 2.0e6) ** 2)
    fit = fit_spectrum(SpectralLine(x, signal, 20.542e9), model="single")
    assert fit.center_plus == pytest.approx(1.5e6, abs=1e3)
    assert fit.sigma == pytest.approx(2.0e6, rel=1e-4)
    assert fit.baseline == pytest.approx(0.02, abs=1e-4)
    with pytest.raises(InvalidInputError):
        fit_spectrum(SpectralLine(x[:10], signal[:10]))
    with pytest.raises(InvalidInputError):
        fit_spectrum(SpectralLine(x, signal), model="triple")


def test_inhomogeneous_field_broadens_and_shifts_the_line(electric_map):
    system = SYSTEM.with_width(3.3e6)
    target = field_from_stark_shift(system, -50e6)
    center = electric_map.center + np.asarray(CLOUD.center_offset)
    scaled = electric_map.scaled(target / np.linalg.norm(electric_map.sample(center)))
    detuning = detuning_grid(-80e6, 20e6, 501)

    at_field = fit_spectrum(synthesize_spectrum(system, scaled, 0.0, CLOUD, detuning, seed=2, n_samples=5000),
                            model="single")
    at_zero = fit_spectrum(synthesize_spectrum(system, scaled.scaled(0.0), 0.0, CLOUD, detuning, seed=2,
                                               n_samples=5000), model="single")
    assert at_field.sigma > at_zero.sigma
    assert at_field.center_plus - at_zero.center_plus == pytest.approx(-50e6, rel=0.2)


def test_broadening_analysis():
    result = broadening_analysis(13.41e6, 3.3e6, -50e6)
    assert result.field_broadening == pytest.approx(13.0e6, rel=1e-3)
    assert result.relative_inhomogeneity == pytest.approx(0.130, rel=1e-3)
    with pytest.raises(InvalidInputError):
        broadening_analysis(3.0e6, 3.3e6, -50e6)


def synthetic_points(with_centers=True):
    per_ampere = zeeman_shift(SYSTEM, 5.1 * GAUSS)
    points = []
    for current in (0.6078, 0.9804, 1.4118, 1.9216):
        plus = SYSTEM.offset_plus + per_ampere * current
        minus = SYSTEM.offset_minus - per_ampere * current
        points.append(CalibrationPoint(current, plus - minus,
                                       plus if with_centers else None, minus if with_centers else None))
    return points


def test_joint_calibration_recovers_slope_and_offsets():
    result = linear_calibration_fit(synthetic_points(), SYSTEM)
    assert result.method == "joint"
    assert result.gauss_per_ampere == pytest.approx(5.1, rel=1e-6)
    assert result.offset_plus == pytest.approx(SYSTEM.offset_plus, abs=100.0)
    assert result.offset_minus == pytest.approx(SYSTEM.offset_minus, abs=100.0)


def test_splitting_calibration_recovers_slope():
    result = linear_calibration_fit(synthetic_points(with_centers=False), SYSTEM)
    assert result.method == "splitting"
    assert result.gauss_per_ampere == pytest.approx(5.1, rel=1e-6)
    assert result.offset_difference == pytest.approx(-2.0e6, abs=100.0)
    assert result.offset_plus is None


def test_calibration_needs_three_distinct_currents():
    points = synthetic_points()
    with pytest.raises(InvalidInputError):
        linear_calibration_fit(points[:2], SYSTEM)
    same = [CalibrationPoint(1.0, p.splitting, p.center_plus, p.center_minus) for p in points]
    with pytest.raises(InvalidInputError):
        linear_calibration_fit(same, SYSTEM)


def test_zeeman_calibration_pipeline(field_service, geometry, small_grid):
    e_map = field_service.solve_electrostatic(geometry, small_grid, 0.0, 0.15)
    points = []
    for b_gauss in (3.1, 5.0, 7.2, 9.8):
        current = b_gauss / 5.1
        line = synthesize_spectrum(SYSTEM, e_map, b_gauss * GAUSS, CLOUD, DETUNING, seed=int(b_gauss * 10),
                                   n_samples=5000)
        fit = fit_spectrum(line)
        assert fit.resolved
        points.append(CalibrationPoint(current, fit.splitting, fit.center_plus, fit.center_minus))
    result = linear_calibration_fit(points, SYSTEM)
    assert result.gauss_per_ampere == pytest.approx(5.1, rel=0.03)


def test_cloud_inhomogeneity_is_reported(electric_map):
    stats = field_statistics(electric_map, Region.centered(electric_map.center, 1e-3), CLOUD)
    assert stats.cloud_inhomogeneity is not None
    assert 0.0 <= stats.cloud_inhomogeneity < 1.0


def test_stark_shift_is_quadratic_and_zeeman_terms_cancel():
    assert stark_shift(SYSTEM, 20.0) == 4.0 * stark_shift(SYSTEM, 10.0)
    for b_gauss in (3.5, 5.0, 9.8):
        lines = transition_frequencies(SYSTEM, 10.0, b_gauss * GAUSS)
        nu0 = SYSTEM.field_free_frequency
        total = (lines.nu_plus - nu0 - SYSTEM.offset_plus) + (lines.nu_minus - nu0 - SYSTEM.offset_minus)
        assert total == pytest.approx(2.0 * stark_shift(SYSTEM, 10.0), abs=1e-2)


def test_noisy_double_gaussian_is_recovered():
    x = np.linspace(-20e6, 20e6, 801)
    clean = double_gaussian(x / 1e6, 6.0, -5.0, 1.5, 1.0, 0.8, 0.0)
    noisy = clean + 0.01 * np.random.default_rng(3).standard_normal(x.size)
    fit = fit_spectrum(SpectralLine(x, noisy, 20.542e9))
    assert fit.resolved
    assert fit.center_plus == pytest.approx(6.0e6, abs=0.02 * 1.5e6)
    assert fit.center_minus == pytest.approx(-5.0e6, abs=0.02 * 1.5e6)
    assert fit.sigma == pytest.approx(1.5e6, rel=0.02)


def test_symmetric_doublet_has_equal_amplitudes():
    x = np.linspace(-20e6, 20e6, 801)
    fit = fit_spectrum(SpectralLine(x, double_gaussian(x / 1e6, 5.0, -5.0, 1.5, 1.0, 1.0, 0.0), 20.542e9))
    assert fit.resolved
    assert fit.amplitude_plus == pytest.approx(fit.amplitude_minus, rel=1e-4)
    assert fit.center_plus == pytest.approx(-fit.center_minus, abs=1e2)


def test_point_like_cloud_shows_only_the_homogeneous_width(electric_map):
    point = CloudSpec(1e-6, CLOUD.center_offset)
    center = point.center_in(electric_map)
    scaled = electric_map.scaled(field_from_stark_shift(SYSTEM, -5e6) / np.linalg.norm(electric_map.sample(center)))
    line = synthesize_spectrum(SYSTEM, scaled, 7.2 * GAUSS, point, DETUNING, seed=4, n_samples=10000)
    fit = fit_spectrum(line)
    assert fit.resolved
    assert fit.sigma == pytest.approx(SYSTEM.homogeneous_width, rel=0.05)


def test_cloud_outside_the_map_is_rejected_consistently(magnetic_map, electric_map):
    fits = CloudSpec(1.5e-3)
    too_large = CloudSpec(7.2e-3)
    line = synthesize_spectrum(SYSTEM, electric_map.scaled(0.0), 7.2 * GAUSS, fits, DETUNING, seed=1,
                               n_samples=1000, magnetic_map=magnetic_map)
    assert line.provenance["magnetic_profile"]
    assert field_statistics(electric_map, cloud=fits).cloud_mean > 0
    with pytest.raises(InvalidInputError):
        synthesize_spectrum(SYSTEM, electric_map, 0.0, too_large, DETUNING, seed=1)
    with pytest.raises(InvalidInputError):
        field_statistics(electric_map, cloud=too_large)


@pytest.mark.slow
def test_highest_fields_broaden_the_line_fourfold(drive_map):
    system = SYSTEM.with_width(3.3e6)
    stats = field_statistics(drive_map, cloud=CLOUD)
    target = field_from_stark_shift(system, -50e6)
    scaled = drive_map.scaled(target / np.hypot(stats.cloud_mean, stats.cloud_std))
    detuning = detuning_grid(-130e6, 20e6, 751)

    at_field = fit_spectrum(synthesize_spectrum(system, scaled, 0.0, CLOUD, detuning, seed=2, n_samples=5000),
                            model="single")
    at_zero = fit_spectrum(synthesize_spectrum(system, scaled.scaled(0.0), 0.0, CLOUD, detuning, seed=2,
                                               n_samples=5000), model="single")
    assert at_field.sigma / at_zero.sigma == pytest.approx(4.0, rel=0.25)
    assert at_field.center_plus - at_zero.center_plus == pytest.approx(-50e6, rel=0.25)


@pytest.mark.slow
def test_magnetic_inhomogeneity_adds_little_width(drive_map, reference_magnetic_map):
    cloud = CloudSpec(1.5e-3)
    no_field = drive_map.scaled(0.0)
    detuning = detuning_grid(-25e6, 20e6, 901)
    profiled = synthesize_spectrum(SYSTEM, no_field, 9.8 * GAUSS, cloud, detuning, seed=8, n_samples=5000,
                                   magnetic_map=reference_magnetic_map)
    flat = synthesize_spectrum(SYSTEM, no_field, 9.8 * GAUSS, cloud, detuning, seed=8, n_samples=5000)
    sigma_profiled = fit_spectrum(profiled).sigma
    sigma_flat = fit_spectrum(flat).sigma
    added = np.sqrt(max(sigma_profiled ** 2 - sigma_flat ** 2, 0.0))
    assert added <= 0.15e6
