# tests/test_repositories.py
from pathlib import Path

import numpy as np
import pytest
import yaml

from cavitybias.domain.errors import InvalidInputError
from cavitybias.domain.results import ResultTable
from cavitybias.infrastructure.repositories import (
    CsvResultRepository,
    InMemoryResultRepository,
    read_field_map,
    read_table,
    read_trace,
    write_field_map,
    write_table,
    write_trace,
)
from cavitybias.services.txn import synthesize_trace


def test_field_map_round_trip_is_exact(tmp_path, electric_map):
    path = tmp_path / "electric.csv"
    write_field_map(path, electric_map)
    loaded = read_field_map(path)
    assert loaded.kind == "electric"
    assert loaded.spacing == electric_map.spacing
    assert np.array_equal(loaded.values, electric_map.values)
    assert np.array_equal(loaded.potential, electric_map.potential)


def test_field_map_header_uses_unit_suffixes(tmp_path, magnetic_map):
    path = tmp_path / "magnetic.csv"
    write_field_map(path, magnetic_map)
    lines = path.read_text().splitlines()
    assert lines[0] == "# kind: magnetic"
    assert lines[4] == "x_m,y_m,z_m,Fx_T,Fy_T,Fz_T,potential_T_m"


def test_field_map_without_potential(tmp_path, uniform_map):
    path = tmp_path / "uniform.csv"
    write_field_map(path, uniform_map(3.0))
    loaded = read_field_map(path)
    assert loaded.potential is None
    assert np.all(loaded.values[..., 0] == 3.0)


def test_malformed_field_map_rejected(tmp_path):
    path = tmp_path / "broken.csv"
    path.write_text("# kind: electric\nx_m,y_m,z_m\n")
    with pytest.raises(InvalidInputError):
        read_field_map(path)


def test_table_round_trip_keeps_missing_values(tmp_path):
    table = ResultTable.from_records("fits", ["current_A", "splitting_Hz"],
                                     [{"current_A": 0.6, "splitting_Hz": 6.6e6}, {"current_A": 0.1}])
    path = tmp_path / "fits.csv"
    write_table(path, table)
    loaded = read_table(path)
    assert loaded.name == "fits"
    assert loaded.columns == ["current_A", "splitting_Hz"]
    assert np.array_equal(loaded.rows, table.rows, equal_nan=True)


def test_trace_round_trip(tmp_path):
    trace = synthesize_trace(12.4e3, 651.0, np.linspace(-62e3, 62e3, 51), noise=0.02, seed=1)
    path = tmp_path / "trace.csv"
    write_trace(path, trace)
    loaded = read_trace(path)
    assert np.array_equal(loaded.detuning, trace.detuning)
    assert np.array_equal(loaded.amplitude, trace.amplitude)


def test_csv_repository_writes_into_out_dir(tmp_path):
    repository = CsvResultRepository(str(tmp_path / "run"))
    table_path = repository.save_table(ResultTable("modes", ["frequency_Hz"], [[1.0], [2.0]]))
    summary_path = repository.save_summary({"kind": "modes", "values": np.array([1.0, 2.0])})
    assert repository.list_outputs() == [table_path, summary_path]
    assert yaml.safe_load(Path(summary_path).read_text()) == {"kind": "modes", "values": [1.0, 2.0]}


def test_in_memory_repository_round_trip(electric_map):
    repository = InMemoryResultRepository()
    repository.save_field_map("electric_field", electric_map)
    assert repository.load_field_map("electric_field") is electric_map
    with pytest.raises(InvalidInputError):
        repository.load_field_map("missing")
