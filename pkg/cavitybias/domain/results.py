# cavitybias/domain/results.py
"""
Result containers produced by scenario runs and consumed by result repositories.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from .errors import InvalidInputError
from .models import FieldMap


@dataclass(eq=False)
class ResultTable:
    """
    Rectangular numeric table; column names carry their SI unit as a suffix (``detuning_Hz``).
    """
    name: str
    columns: List[str]
    rows: np.ndarray

    def __post_init__(self):
        self.rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if self.rows.size and self.rows.shape[1] != len(self.columns):
            raise InvalidInputError(
                f"Table {self.name!r} has {self.rows.shape[1]} columns of data for {len(self.columns)} headers")

    @classmethod
    def from_records(cls, name: str, columns: Sequence[str], records: Sequence[Dict[str, Any]]) -> "ResultTable":
        """Build from dicts keyed by column name; missing or None values become NaN."""
        rows = [[np.nan if r.get(c) is None else float(r[c]) for c in columns] for r in records]
        return cls(name, list(columns), np.array(rows, dtype=float).reshape(len(rows), len(columns)))

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def __len__(self) -> int:
        return self.rows.shape[0] if self.rows.size else 0


@dataclass(eq=False)
class ScenarioResult:
    """Everything a scenario run produced: tables, field maps and the summary report."""
    kind: str
    summary: Dict[str, Any] = field(default_factory=dict)
    tables: Dict[str, ResultTable] = field(default_factory=dict)
    field_maps: Dict[str, FieldMap] = field(default_factory=dict)
    provenance: Dict[str, Any] = field(default_factory=dict)

    def add_table(self, table: ResultTable) -> None:
        self.tables[table.name] = table

    @property
    def is_empty(self) -> bool:
        return not (self.summary or self.tables or self.field_maps)
