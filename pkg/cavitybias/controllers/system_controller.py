# cavitybias/controllers/system_controller.py
"""
System controller for tool version and runtime configuration.
"""

from typing import Any, Dict

from .. import __version__
from ..controllers.base_controller import BaseController
from ..domain.field_solver import FieldSolver
from ..infrastructure.cache import CacheService


class SystemController(BaseController):
    """Controller for system operations."""

    def __init__(self, solver: FieldSolver, cache_service: CacheService, result_store: str):
        super().__init__()
        self.solver = solver
        self.cache_service = cache_service
        self.result_store = result_store

    def get_environment_info(self) -> Dict[str, Any]:
        """Version, default solver, cache and result store in use."""
        return self.success_response({
            "version": __version__,
            "solver": self.solver.get_solver_name(),
            "cache": self.cache_service.get_stats(),
            "result_store": self.result_store,
        }, "Environment information retrieved successfully")
