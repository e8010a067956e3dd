# cavitybias/infrastructure/repositories.py
"""
Infrastructure layer implementations of result repositories.
CSV tables and field maps with unit-suffixed headers, YAML summary reports.
"""

import csv
import logging
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import yaml

from ..domain.errors import InvalidInputError
from ..domain.models import FieldMap
from ..domain.repositories import ResultRepository
from ..domain.results import ResultTable
from ..domain.spectro_models import TransmissionTrace

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.yaml"
_FIELD_UNITS = {"electric": ("V_per_m", "V"), "magnetic": ("T", "T_m")}


def format_float(value: float) -> str:
    """Shortest string that parses back to the same double."""
    return repr(float(value))


def to_plain(value: Any) -> Any:
    """Convert numpy scalars, arrays and tuples into plain YAML-safe Python values."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    return value


def write_table(path: Path, table: ResultTable) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(table.columns)
        for row in table.rows if len(table) else []:
            writer.writerow([format_float(v) for v in row])


def read_table(path: Path, name: str = None) -> ResultTable:
    with open(path, newline="") as f:
        rows = [row for row in csv.reader(f) if row and not row[0].startswith("#")]
    if not rows:
        raise InvalidInputError(f"Table file {path} is empty")
    columns, data = rows[0], [[float(v) for v in row] for row in rows[1:]]
    return ResultTable(name or Path(path).stem, columns, np.array(data, dtype=float).reshape(len(data), len(columns)))


def write_field_map(path: Path, field_map: FieldMap) -> None:
    """Write node coordinates, field components and, when attached, the potential."""
    field_unit, potential_unit = _FIELD_UNITS[field_map.kind]
    columns = ["x_m", "y_m", "z_m"] + [f"F{axis}_{field_unit}" for axis in "xyz"]
    has_potential = field_map.potential is not None
    if has_potential:
        columns.append(f"potential_{potential_unit}")

    grids = np.meshgrid(*field_map.axes, indexing="ij")
    blocks = [g.reshape(-1, 1) for g in grids] + [field_map.values.reshape(-1, 3)]
    if has_potential:
        blocks.append(field_map.potential.reshape(-1, 1))
    data = np.hstack(blocks)

    with open(path, "w", newline="") as f:
        f.write(f"# kind: {field_map.kind}\n")
        f.write("# shape: " + " ".join(str(n) for n in field_map.shape) + "\n")
        f.write("# spacing_m: " + " ".join(format_float(h) for h in field_map.spacing) + "\n")
        f.write("# origin_m: " + " ".join(format_float(o) for o in field_map.origin) + "\n")
        writer = csv.writer(f)
        writer.writerow(columns)
        for row in data:
            writer.writerow([format_float(v) for v in row])


def read_field_map(path: Path) -> FieldMap:
    """Inverse of ``write_field_map``; field values and potential round-trip bit-exactly."""
    metadata: Dict[str, str] = {}
    with open(path, newline="") as f:
        lines = f.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            metadata[key.strip()] = value.strip()
        elif line:
            body.append(line)
    try:
        kind = metadata["kind"]
        shape = tuple(int(n) for n in metadata["shape"].split())
        spacing = tuple(float(h) for h in metadata["spacing_m"].split())
        origin = tuple(float(o) for o in metadata["origin_m"].split())
    except (KeyError, ValueError) as e:
        raise InvalidInputError(f"Field map file {path} has a malformed header: {str(e)}", module="fieldsolve")

    rows = list(csv.reader(body))
    columns = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
    expected = shape[0] * shape[1] * shape[2]
    if data.shape[0] != expected:
        raise InvalidInputError(f"Field map file {path} has {data.shape[0]} rows, expected {expected}",
                                module="fieldsolve")
    values = data[:, 3:6].reshape(shape + (3,))
    potential = data[:, 6].reshape(shape) if len(columns) > 6 else None
    return FieldMap(values, spacing, origin, kind, potential)


def write_trace(path: Path, trace: TransmissionTrace) -> None:
    write_table(path, ResultTable("trace", ["detuning_Hz", "amplitude"],
                                  np.column_stack([trace.detuning, trace.amplitude])))


def read_trace(path: Path) -> TransmissionTrace:
    table = read_table(path)
    if table.columns[:2] != ["detuning_Hz", "amplitude"]:
        raise InvalidInputError(f"Trace file {path} must have columns detuning_Hz, amplitude", module="txn")
    return TransmissionTrace(table.column("detuning_Hz"), table.column("amplitude"))


class CsvResultRepository(ResultRepository):
    """File implementation of ResultRepository writing into one output directory."""

    def __init__(self, out_dir: str):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self._written: List[str] = []
        logger.info(f"CsvResultRepository initialized with out_dir={self.out_dir}")

    def _record(self, path: Path) -> str:
        self._written.append(str(path))
        logger.debug(f"Wrote {path}")
        return str(path)

    def save_table(self, table: ResultTable) -> str:
        path = self.out_dir / f"{table.name}.csv"
        write_table(path, table)
        return self._record(path)

    def save_summary(self, summary: Dict[str, Any]) -> str:
        path = self.out_dir / SUMMARY_FILE
        with open(path, "w") as f:
            yaml.safe_dump(to_plain(summary), f, sort_keys=False, default_flow_style=False)
        return self._record(path)

    def save_field_map(self, name: str, field_map: FieldMap) -> str:
        path = self.out_dir / f"{name}.csv"
        write_field_map(path, field_map)
        return self._record(path)

    def load_field_map(self, location: str) -> FieldMap:
        path = Path(location)
        if not path.is_absolute() and not path.exists():
            path = self.out_dir / path
        return read_field_map(path)

    def list_outputs(self) -> List[str]:
        return list(self._written)


class InMemoryResultRepository(ResultRepository):
    """In-memory implementation of ResultRepository."""

    def __init__(self):
        self.tables: Dict[str, ResultTable] = {}
        self.field_maps: Dict[str, FieldMap] = {}
        self.summary: Dict[str, Any] = {}
        self._written: List[str] = []

    def save_table(self, table: ResultTable) -> str:
        self.tables[table.name] = table
        self._written.append(table.name)
        return table.name

    def save_summary(self, summary: Dict[str, Any]) -> str:
        self.summary = to_plain(summary)
        self._written.append("summary")
        return "summary"

    def save_field_map(self, name: str, field_map: FieldMap) -> str:
        self.field_maps[name] = field_map
        self._written.append(name)
        return name

    def load_field_map(self, location: str) -> FieldMap:
        if location not in self.field_maps:
            raise InvalidInputError(f"No field map stored under {location!r}", module="fieldsolve")
        return self.field_maps[location]

    def list_outputs(self) -> List[str]:
        return list(self._written)
