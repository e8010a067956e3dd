# cavitybias/domain/repositories.py
"""
Repository interfaces for scenario outputs.
Defines contracts for persisting result tables, field maps and summary reports.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List

from .models import FieldMap
from .results import ResultTable


class ResultRepository(ABC):
    """Abstract repository for scenario outputs."""

    @abstractmethod
    def save_table(self, table: ResultTable) -> str:
        """
        Persist a result table.

        Returns:
            Location of the stored table
        """
        pass

    @abstractmethod
    def save_summary(self, summary: Dict[str, Any]) -> str:
        """Persist the structured summary report."""
        pass

    @abstractmethod
    def save_field_map(self, name: str, field_map: FieldMap) -> str:
        """Persist a field map so it can be imported again."""
        pass

    @abstractmethod
    def load_field_map(self, location: str) -> FieldMap:
        """Load a previously saved field map."""
        pass

    @abstractmethod
    def list_outputs(self) -> List[str]:
        """Locations written so far, in write order."""
        pass
