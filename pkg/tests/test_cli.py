# tests/test_cli.py
from pathlib import Path

import pytest
import yaml
from click.testing import CliRunner

from cavitybias.main import cli


@pytest.fixture(autouse=True)
def environment(monkeypatch):
    for name in ("CAVITY_SOLVER", "CAVITY_SOR_OMEGA", "CAVITY_CACHE_PROVIDER", "CAVITY_RESULT_STORE",
                 "CAVITY_OUT_DIR"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def runner():
    return CliRunner()


def summary(out_dir):
    return yaml.safe_load((Path(out_dir) / "summary.yaml").read_text())


def test_modes_command_writes_frequencies(runner, scenario_dir, tmp_path):
    result = runner.invoke(cli, ["modes", "--config", str(scenario_dir / "modes.yaml"), "--out-dir", str(tmp_path)])
    assert result.exit_code == 0, result.output
    report = summary(tmp_path)
    assert report["kind"] == "modes"
    frequencies = [row["frequency_Hz"] for row in report["results"]["modes"]]
    assert frequencies == pytest.approx([12.203e9, 15.868e9, 20.572e9], rel=2e-4)
    assert "modes.csv" in report["outputs"]
    assert (tmp_path / "modes.csv").exists()
    assert report["provenance"]["config_hash"] in result.output


def test_kind_mismatch_is_a_validation_error(runner, scenario_dir, tmp_path):
    result = runner.invoke(cli, ["fields", "--config", str(scenario_dir / "modes.yaml"), "--out-dir", str(tmp_path)])
    assert result.exit_code == 2


def test_missing_block_exits_with_validation_code(runner, tmp_path):
    config = tmp_path / "bad.yaml"
    config.write_text("schema_version: 1\nkind: modes\n")
    result = runner.invoke(cli, ["run", "--config", str(config), "--out-dir", str(tmp_path / "out")])
    assert result.exit_code == 2
    assert "geometry" in result.output
    assert not (tmp_path / "out").exists()


def test_solver_failure_exits_with_numerical_code(runner, tmp_path):
    config = tmp_path / "stalled.yaml"
    config.write_text(
        "schema_version: 1\nkind: fields\ngeometry: {}\n"
        "grid: {nx: 24, ny: 16, nz: 16, tolerance: 1.0e-9, max_iterations: 1}\n"
        "fields: {solve: [electric]}\n")
    result = runner.invoke(cli, ["fields", "--config", str(config), "--out-dir", str(tmp_path / "out")])
    assert result.exit_code == 3


def test_unwritable_output_exits_with_io_code(runner, scenario_dir, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    result = runner.invoke(cli, ["run", "--config", str(scenario_dir / "modes.yaml"), "--out-dir", str(blocker)])
    assert result.exit_code == 1


def test_losses_scenario(runner, scenario_dir, tmp_path):
    result = runner.invoke(cli, ["run", "--config", str(scenario_dir / "losses.yaml"), "--out-dir", str(tmp_path)])
    assert result.exit_code == 0, result.output
    report = summary(tmp_path)["results"]
    inversion = report["conductivity_inversion"]
    assert inversion[0]["conductivity_S_per_m"] == pytest.approx(2.093e6, rel=1e-3)
    assert report["loss_budget"]["electrode_linewidth_Hz"] == 0.0
    assert (tmp_path / "trapped_flux_q_limit.csv").exists()


def test_fields_scenario_on_small_grid(runner, scenario_dir, tmp_path):
    result = runner.invoke(cli, ["fields", "--config", str(scenario_dir / "fields.yaml"), "--out-dir", str(tmp_path),
                                 "--grid", "24x16x16"])
    assert result.exit_code == 0, result.output
    report = summary(tmp_path)["results"]
    assert report["electric"]["beta_per_cm"] > 0
    assert report["electric"]["drive_cloud_inhomogeneity"] > 0
    assert 0.0 < report["magnetic"]["center_G"] < report["magnetic"]["exterior_field_G"]
    assert report["electrode_response"]["time_constant_s"] == pytest.approx(0.2e-9)


@pytest.mark.slow
def test_fields_scenario_reproduces_reference_values(runner, scenario_dir, tmp_path):
    result = runner.invoke(cli, ["fields", "--config", str(scenario_dir / "fields.yaml"), "--out-dir", str(tmp_path)])
    assert result.exit_code == 0, result.output
    report = summary(tmp_path)["results"]
    assert report["electric"]["center_V_per_cm"] == pytest.approx(0.95, rel=0.10)
    assert report["electric"]["beta_per_cm"] == pytest.approx(0.67, rel=0.10)
    assert report["electric"]["drive_cloud_inhomogeneity"] == pytest.approx(0.13, abs=0.02)
    assert report["magnetic"]["center_G"] == pytest.approx(4.50, rel=0.10)


def test_transmission_scenario(runner, scenario_dir, tmp_path):
    result = runner.invoke(cli, ["transmission", "--config", str(scenario_dir / "transmission.yaml"),
                                 "--out-dir", str(tmp_path)])
    assert result.exit_code == 0, result.output
    report = summary(tmp_path)["results"]["transmission"]
    assert report["fit"]["linewidth_Hz"] == pytest.approx(12.4e3, rel=0.05)
    assert report["thermal_occupation"] == pytest.approx(2.568, rel=2e-3)


SPECTRUM = """\
schema_version: 1
kind: spectrum
seed: 20180101
geometry: {}
fields:
  v1: 0.0
  v2: 0.15
  solve: [electric]
cloud: {}
spectrum:
  n_samples: 1000
"""


def test_spectrum_runs_are_byte_identical(runner, tmp_path):
    config = tmp_path / "spectrum.yaml"
    config.write_text(SPECTRUM)
    for name in ("first", "second"):
        result = runner.invoke(cli, ["spectrum", "--config", str(config), "--out-dir", str(tmp_path / name),
                                     "--grid", "24x16x16"])
        assert result.exit_code == 0, result.output

    first = sorted(p.name for p in (tmp_path / "first").iterdir())
    assert first == sorted(p.name for p in (tmp_path / "second").iterdir())
    assert "spectrum_fits.csv" in first and "line_03.csv" in first
    for name in first:
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()

    calibration = summary(tmp_path / "first")["results"]["spectrum"]["calibration"]
    assert calibration["gauss_per_ampere"] == pytest.approx(5.1, rel=0.03)


def test_info_reports_configuration(runner):
    result = runner.invoke(cli, ["info"])
    assert result.exit_code == 0
    assert "solver: cg" in result.output
    assert "result_store: files" in result.output
