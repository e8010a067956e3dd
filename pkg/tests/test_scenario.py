# tests/test_scenario.py
import pytest

from cavitybias.domain.errors import ScenarioError
from cavitybias.domain.scenario import SCENARIO_KINDS
from cavitybias.infrastructure.config_loader import load_scenario, parse_grid_override


def write(tmp_path, text, name="scenario.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


@pytest.mark.parametrize("kind", SCENARIO_KINDS)
def test_bundled_scenarios_validate(scenario_dir, kind):
    scenario = load_scenario(str(scenario_dir / f"{kind}.yaml"))
    assert scenario.kind == kind
    assert scenario.schema_version == 1


def test_unknown_key_reported_with_line(tmp_path):
    path = write(tmp_path, "schema_version: 1\nkind: modes\ngeometry:\n  lx: 25.6e-3\n  lz_typo: 1\n")
    with pytest.raises(ScenarioError) as excinfo:
        load_scenario(path)
    assert ("geometry.lz_typo", 5) in [(p, line) for p, line, _ in excinfo.value.diagnostics]


def test_invalid_value_reported_with_line(tmp_path):
    path = write(tmp_path, "schema_version: 1\nkind: modes\ngeometry:\n  lx: -1.0\n")
    with pytest.raises(ScenarioError) as excinfo:
        load_scenario(path)
    assert excinfo.value.diagnostics[0][:2] == ("geometry.lx", 4)


def test_missing_block_named_in_diagnostics(tmp_path):
    path = write(tmp_path, "schema_version: 1\nkind: modes\n")
    with pytest.raises(ScenarioError) as excinfo:
        load_scenario(path)
    assert "geometry" in excinfo.value.format_diagnostics()


def test_spectrum_requires_seed(tmp_path):
    path = write(tmp_path, "schema_version: 1\nkind: spectrum\ngeometry: {}\nfields: {}\ncloud: {}\nspectrum: {}\n")
    with pytest.raises(ScenarioError):
        load_scenario(path)
    assert load_scenario(path, seed=3).seed == 3


def test_unphysical_coupling_rejected(tmp_path):
    path = write(tmp_path, "schema_version: 1\nkind: transmission\ntransmission:\n  kappa: 1000.0\n"
                           "  kappa_ext: 600.0\n  noise: 0.0\n")
    with pytest.raises(ScenarioError):
        load_scenario(path)


def test_yaml_syntax_error_has_line(tmp_path):
    path = write(tmp_path, "schema_version: 1\nkind: modes\ngeometry: [unclosed\n")
    with pytest.raises(ScenarioError) as excinfo:
        load_scenario(path)
    assert excinfo.value.diagnostics[0][1] is not None


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(str(tmp_path / "absent.yaml"))


def test_wrong_schema_version(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(write(tmp_path, "schema_version: 2\nkind: modes\ngeometry: {}\n"))


def test_command_line_overrides(scenario_dir):
    scenario = load_scenario(str(scenario_dir / "fields.yaml"), seed=9, grid="24x16x16", out_dir="elsewhere")
    assert scenario.seed == 9
    assert (scenario.grid.nx, scenario.grid.ny, scenario.grid.nz) == (24, 16, 16)
    assert scenario.grid.tolerance == 1e-6
    assert scenario.output.out_dir == "elsewhere"


def test_grid_override_parsing():
    assert parse_grid_override("64x32X48") == (64, 32, 48)
    with pytest.raises(ScenarioError):
        parse_grid_override("64x32")


def test_config_hash_ignores_output_but_not_physics(scenario_dir):
    path = str(scenario_dir / "spectrum.yaml")
    base = load_scenario(path)
    assert load_scenario(path, out_dir="other").config_hash() == base.config_hash()
    assert load_scenario(path, seed=1).config_hash() != base.config_hash()
    assert load_scenario(path, grid="32x16x16").config_hash() != base.config_hash()
