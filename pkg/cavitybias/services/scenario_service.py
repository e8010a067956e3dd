# cavitybias/services/scenario_service.py
"""
Service layer for running validated scenarios and exporting their results.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from .. import __version__
from ..domain.errors import InvalidInputError
from ..domain.models import FieldMap, ModeIndex, Region
from ..domain.repositories import ResultRepository
from ..domain.results import ResultTable, ScenarioResult
from ..domain.scenario import Scenario
from ..domain.spectro_models import CalibrationPoint
from ..infrastructure.repositories import read_field_map
from . import geometry as geometry_ops
from . import lossmodel, spectro, tuning, txn
from .fieldsolve import FieldService, electrode_response, field_statistics

logger = logging.getLogger(__name__)

GAUSS = 1e-4


class ScenarioService:
    """Service for running scenarios of every kind."""

    def __init__(self, field_service: FieldService):
        """
        Initialize scenario service.

        Args:
            field_service: Service used for the dc field solves
        """
        self.field_service = field_service
        self._runners = {
            "modes": self._run_modes,
            "fields": self._run_fields,
            "losses": self._run_losses,
            "tuning": self._run_tuning,
            "spectrum": self._run_spectrum,
            "transmission": self._run_transmission,
        }
        logger.info(f"ScenarioService initialized with solver: {field_service.solver.get_solver_name()}")

    def provenance(self, scenario: Scenario) -> Dict[str, Any]:
        return {
            "tool": "cavitybias",
            "tool_version": __version__,
            "schema_version": scenario.schema_version,
            "kind": scenario.kind,
            "config_hash": scenario.config_hash(),
            "seed": scenario.seed,
            "solver": scenario.grid.solver or self.field_service.solver.get_solver_name(),
        }

    def run_scenario(self, scenario: Scenario) -> ScenarioResult:
        """
        Run a validated scenario.

        Args:
            scenario: Validated scenario

        Returns:
            ScenarioResult with tables, optional field maps and the summary

        Raises:
            InvalidInputError: For inputs rejected by a physics module
            NumericalError: For non-converging solves or fits
        """
        result = ScenarioResult(kind=scenario.kind, provenance=self.provenance(scenario))
        logger.info(f"Running {scenario.kind} scenario")
        self._runners[scenario.kind](scenario, result)
        result.summary = {"kind": scenario.kind, "provenance": result.provenance, "results": result.summary}
        return result

    def export_results(self, result: ScenarioResult, repository: ResultRepository,
                       formats: Sequence[str] = ("csv", "summary")) -> List[str]:
        """
        Write result tables, field maps and the summary report.

        Args:
            result: Non-empty scenario result
            repository: Destination
            formats: Any of "csv" and "summary"

        Returns:
            Locations written

        Raises:
            InvalidInputError: For an empty result or an unknown format
            OSError: If the destination is not writable
        """
        if result.is_empty:
            raise InvalidInputError("No results to export", module="cli")
        unknown = set(formats) - {"csv", "summary"}
        if unknown:
            raise InvalidInputError(f"Unknown export format(s): {', '.join(sorted(unknown))}", module="cli")

        written = []
        if "csv" in formats:
            for table in result.tables.values():
                written.append(repository.save_table(table))
            for name, field_map in result.field_maps.items():
                written.append(repository.save_field_map(name, field_map))
        if "summary" in formats:
            summary = dict(result.summary)
            summary["outputs"] = [Path(location).name for location in written]
            written.append(repository.save_summary(summary))
        logger.info(f"Exported {len(written)} output(s)")
        return written

    def _run_modes(self, scenario: Scenario, result: ScenarioResult) -> None:
        geometry = scenario.geometry.to_geometry()
        measured = scenario.modes.measured
        labels = scenario.modes.modes
        records = geometry_ops.mode_table(geometry, [ModeIndex.parse(label) for label in labels],
                                          with_geometry_factor=scenario.modes.geometry_factor)
        for label, record in zip(labels, records):
            record["mode"] = label
            record["measured_frequency_Hz"] = measured.get(label)
            record["relative_deviation"] = ((record["frequency_Hz"] - measured[label]) / measured[label]
                                            if label in measured else None)
        result.add_table(ResultTable.from_records(
            "modes",
            ["m", "n", "l", "frequency_Hz", "measured_frequency_Hz", "relative_deviation", "geometry_factor_ohm"],
            records))
        result.summary["modes"] = records

    def _run_fields(self, scenario: Scenario, result: ScenarioResult) -> None:
        block = scenario.fields
        geometry = scenario.geometry.to_geometry(block.v1, block.v2)
        grid = scenario.grid.to_grid()
        cloud = scenario.cloud.to_cloud() if scenario.cloud else None

        if "electric" in block.solve:
            e_map = self.field_service.solve_electrostatic(geometry, grid, block.v1, block.v2)
            region = Region.centered(e_map.center, block.region_half_size)
            stats = field_statistics(e_map, region, cloud)
            summary = stats.to_dict()
            summary["center_V_per_cm"] = stats.center_value / 100.0
            # field per volt on the second electrode, averaged over the cloud when one is given
            drive = self.field_service.solve_electrostatic(geometry, grid, 0.0, 1.0)
            drive_stats = field_statistics(drive, region, cloud)
            per_volt = drive_stats.cloud_mean if cloud is not None else drive_stats.center_value
            summary["beta_per_cm"] = per_volt / 100.0
            if cloud is not None:
                summary["drive_cloud_inhomogeneity"] = drive_stats.cloud_inhomogeneity
            result.summary["electric"] = summary
            result.add_table(_axis_profile("electric_profile_x", e_map, axis=0, unit="V_per_m"))
            if block.export_maps:
                result.field_maps["electric_field"] = e_map

        if "magnetic" in block.solve:
            b_map = self.field_service.solve_magnetostatic(geometry, grid, block.b_ext)
            region = Region.centered(b_map.center, block.region_half_size)
            stats = field_statistics(b_map, region, cloud)
            summary = stats.to_dict()
            summary["center_G"] = stats.center_value / GAUSS
            summary["exterior_field_G"] = block.b_ext / GAUSS
            result.summary["magnetic"] = summary
            result.add_table(_axis_profile("magnetic_profile_z", b_map, axis=2, unit="T"))
            if block.export_maps:
                result.field_maps["magnetic_field"] = b_map

        result.summary["electrode_response"] = electrode_response(block.electrode_capacitance,
                                                                  block.source_impedance).to_dict()

    def _run_losses(self, scenario: Scenario, result: ScenarioResult) -> None:
        block = scenario.losses
        geometry = scenario.geometry.to_geometry()
        mode = ModeIndex.parse(block.mode)
        material = scenario.material.to_material()

        budget = lossmodel.loss_budget(geometry, mode, block.base_linewidth, material,
                                       block.transmission_amplitude, block.frequency)
        budget_record = budget.to_dict()
        result.add_table(ResultTable.from_records(
            "loss_budget",
            ["frequency_Hz", "base_linewidth_Hz", "electrode_linewidth_Hz", "trapped_flux_linewidth_Hz",
             "coupling_linewidth_Hz", "total_linewidth_Hz", "loaded_q", "internal_q"],
            [budget_record]))

        conductivity_records = []
        for increase in block.linewidth_increases:
            sigma = lossmodel.conductivity_from_linewidth(increase, mode)
            conductivity_records.append({
                "linewidth_increase_Hz": increase,
                "conductivity_S_per_m": sigma,
                "rrr_equivalent": lossmodel.rrr_from_conductivity(sigma),
            })
        result.add_table(ResultTable.from_records(
            "conductivity", ["linewidth_increase_Hz", "conductivity_S_per_m", "rrr_equivalent"],
            conductivity_records))

        limit_records = []
        for trapped in block.trapped_fields:
            limit = lossmodel.trapped_flux_q_limit(geometry, mode, trapped)
            limit_records.append({"trapped_field_T": trapped, "resistance_ohm": limit.resistance,
                                  "q_limit": limit.q, "geometry_factor_ohm": limit.geometry_factor})
        result.add_table(ResultTable.from_records(
            "trapped_flux_q_limit", ["trapped_field_T", "resistance_ohm", "q_limit", "geometry_factor_ohm"],
            limit_records))

        result.summary["loss_budget"] = budget_record
        result.summary["material"] = material.to_dict()
        result.summary["conductivity_inversion"] = conductivity_records
        result.summary["trapped_flux_q_limit"] = [
            {**r, "q_limit": r["q_limit"] if r["q_limit"] is not None else "no-limit"} for r in limit_records]

    def _run_tuning(self, scenario: Scenario, result: ScenarioResult) -> None:
        geometry = scenario.geometry.to_geometry()
        mode = ModeIndex.parse(scenario.tuning.mode)
        summary = {}
        for rod_block in tqdm(scenario.tuning.rods, desc="tuning rods", disable=None):
            depths = np.linspace(0.0, rod_block.max_depth, rod_block.n_depths)
            curve = tuning.tuning_curve(geometry, mode, rod_block.to_rod(), depths)
            records = [point.to_dict() for point in curve]
            result.add_table(ResultTable.from_records(
                f"tuning_{rod_block.name}",
                ["insertion_depth_m", "shift_Hz", "relative_shift", "non_perturbative"],
                records))
            summary[rod_block.name] = {
                "material": rod_block.material,
                "max_depth_m": rod_block.max_depth,
                "shift_at_max_depth_Hz": curve[-1].shift,
                "non_perturbative": any(p.non_perturbative for p in curve),
            }
        result.summary["tuning"] = summary

    def _electric_map_for_spectrum(self, scenario: Scenario) -> FieldMap:
        block = scenario.spectrum
        if block.field_map_path:
            field_map = read_field_map(Path(block.field_map_path))
            if field_map.kind != "electric":
                raise InvalidInputError(f"{block.field_map_path} is not an electric field map", module="spectro")
            logger.info(f"Imported electric field map from {block.field_map_path}")
            return field_map
        fields = scenario.fields
        geometry = scenario.geometry.to_geometry(fields.v1, fields.v2)
        return self.field_service.solve_electrostatic(geometry, scenario.grid.to_grid(), fields.v1, fields.v2)

    def _run_spectrum(self, scenario: Scenario, result: ScenarioResult) -> None:
        block = scenario.spectrum
        system = block.to_system()
        cloud = scenario.cloud.to_cloud()
        e_map = self._electric_map_for_spectrum(scenario)
        b_map = None
        if block.magnetic_profile:
            geometry = scenario.geometry.to_geometry()
            b_map = self.field_service.solve_magnetostatic(geometry, scenario.grid.to_grid(),
                                                           scenario.fields.b_ext)
        detuning = spectro.detuning_grid(block.detuning_start, block.detuning_stop, block.n_points)

        seeds = np.random.SeedSequence(scenario.seed).spawn(len(block.currents))
        fit_records, points = [], []
        for index, (current, child) in enumerate(tqdm(list(zip(block.currents, seeds)), desc="spectra",
                                                     disable=None)):
            b_field = block.gauss_per_ampere * current * GAUSS
            line = spectro.synthesize_spectrum(system, e_map, b_field, cloud, detuning,
                                               seed=int(child.generate_state(1)[0]), n_samples=block.n_samples,
                                               magnetic_map=b_map)
            fit = spectro.fit_spectrum(line, block.fit_model)
            result.add_table(ResultTable(f"line_{index:02d}", ["detuning_Hz", "signal"],
                                         np.column_stack([line.detuning, line.signal])))
            fit_records.append({
                "current_A": current,
                "b_applied_T": b_field,
                "nu_plus_Hz": fit.reference_frequency + fit.center_plus,
                "nu_minus_Hz": (fit.reference_frequency + fit.center_minus) if fit.resolved else None,
                "fwhm_Hz": fit.fwhm,
                "splitting_Hz": fit.splitting,
                "resolved": float(fit.resolved),
            })
            if fit.resolved:
                points.append(CalibrationPoint(current, fit.splitting, fit.center_plus, fit.center_minus))

        result.add_table(ResultTable.from_records(
            "spectrum_fits",
            ["current_A", "b_applied_T", "nu_plus_Hz", "nu_minus_Hz", "fwhm_Hz", "splitting_Hz", "resolved"],
            fit_records))

        center_field = float(np.linalg.norm(e_map.sample(e_map.center + np.asarray(cloud.center_offset))))
        summary: Dict[str, Any] = {
            "system": system.to_dict(),
            "cloud": cloud.to_dict(),
            "cloud_center_field_V_per_m": center_field,
            "cloud_center_stark_shift_Hz": float(spectro.stark_shift(system, center_field)),
            "injected_gauss_per_ampere": block.gauss_per_ampere,
            "fits": [{**r, "resolved": bool(r["resolved"])} for r in fit_records],
            "calibration": None,
        }
        if len(points) >= 3:
            summary["calibration"] = spectro.linear_calibration_fit(points, system).to_dict()
        else:
            logger.warning(f"Only {len(points)} resolved line(s); coil calibration skipped")
        if block.coil_turns and block.coil_radius:
            summary["helmholtz_gauss_per_ampere"] = spectro.helmholtz_field_per_ampere(
                block.coil_radius, block.coil_turns) / GAUSS
        result.summary["spectrum"] = summary

    def _run_transmission(self, scenario: Scenario, result: ScenarioResult) -> None:
        block = scenario.transmission
        half_span = 0.5 * block.span_linewidths * block.kappa
        detuning = np.linspace(-half_span, half_span, block.n_points)
        sweep_seed, trace_seed = (np.random.SeedSequence(scenario.seed).spawn(2)
                                  if scenario.seed is not None else (None, None))

        trace = txn.synthesize_trace(block.kappa, block.kappa_ext, detuning, noise=block.noise,
                                     seed=_child_int(trace_seed), temperature=block.temperature,
                                     center_frequency=block.frequency)
        fit = txn.fit_lorentzian(trace)
        model = txn.s21_model(block.kappa, block.kappa_ext, detuning) / (2.0 * block.kappa_ext / block.kappa)
        result.add_table(ResultTable("transmission_trace", ["detuning_Hz", "amplitude", "model_amplitude"],
                                     np.column_stack([trace.detuning, trace.amplitude, model])))

        photon_numbers = list(block.photon_numbers)
        sweep = txn.linewidth_vs_photon_number(photon_numbers, block.frequency, block.kappa, block.kappa_ext,
                                               detuning, noise=block.noise, seed=_child_int(sweep_seed))
        result.add_table(ResultTable.from_records(
            "linewidth_vs_photon_number", ["photon_number", "drive_power_W", "linewidth_Hz"],
            [p.to_dict() for p in sweep]))

        peak = 2.0 * block.kappa_ext / block.kappa
        linewidths = np.array([p.fitted_linewidth for p in sweep])
        result.summary["transmission"] = {
            "fit": fit.to_dict(),
            "injected_linewidth_Hz": block.kappa,
            "quality_factors": lossmodel.quality_factors(block.frequency, fit.linewidth, peak).to_dict(),
            "thermal_occupation": txn.thermal_occupation(block.temperature, block.frequency),
            "photon_sweep": {
                "linewidth_mean_Hz": float(linewidths.mean()),
                "linewidth_relative_spread": float(linewidths.std() / linewidths.mean()),
                "min_photon_number": min(photon_numbers),
                "max_photon_number": max(photon_numbers),
            },
        }


def _child_int(child: Optional[np.random.SeedSequence]) -> Optional[int]:
    return None if child is None else int(child.generate_state(1)[0])


def _axis_profile(name: str, field_map: FieldMap, axis: int, unit: str) -> ResultTable:
    """Field components along the line through the map center parallel to ``axis``."""
    index = [n // 2 for n in field_map.shape]
    line = [slice(None) if a == axis else index[a] for a in range(3)]
    values = field_map.values[tuple(line)]
    coordinate = field_map.axes[axis]
    label = "xyz"[axis]
    return ResultTable(name, [f"{label}_m", f"Fx_{unit}", f"Fy_{unit}", f"Fz_{unit}", f"magnitude_{unit}"],
                       np.column_stack([coordinate, values, np.linalg.norm(values, axis=-1)]))
