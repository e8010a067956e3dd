# cavitybias/container.py
"""
Dependency injection container for cavitybias.
Manages dependencies and provides instances of services.
"""

import logging
import os
from typing import Callable

from .controllers.scenario_controller import ScenarioController
from .controllers.system_controller import SystemController
from .domain.field_solver import FieldSolver
from .domain.repositories import ResultRepository
from .infrastructure.cache import CacheService
from .infrastructure.cache.factory import CacheFactory
from .infrastructure.repositories import CsvResultRepository, InMemoryResultRepository
from .infrastructure.solvers.factory import SolverFactory
from .services.fieldsolve import FieldService
from .services.scenario_service import ScenarioService

logger = logging.getLogger(__name__)


class Container:
    """Dependency injection container."""

    def __init__(self):
        solver_type = os.getenv("CAVITY_SOLVER", "cg").lower()
        logger.info(f"Using field solver: {solver_type}")
        self._solver = SolverFactory.create_solver(solver_type)

        cache_provider = os.getenv("CAVITY_CACHE_PROVIDER", "memory").lower()
        logger.info(f"Using cache provider: {cache_provider}")
        self._cache_service = CacheFactory.create_service(cache_provider)

        self._result_store = os.getenv("CAVITY_RESULT_STORE", "files").lower()
        logger.info(f"Using result store: {self._result_store}")
        self._repository_factory = self._create_repository_factory(self._result_store)

        self._field_service = FieldService(self._solver, self._cache_service)
        self._scenario_service = ScenarioService(self._field_service)

        self._scenario_controller = ScenarioController(
            self._scenario_service,
            self._repository_factory,
            default_out_dir=os.getenv("CAVITY_OUT_DIR", "results"),
        )
        self._system_controller = SystemController(self._solver, self._cache_service, self._result_store)

    def _create_repository_factory(self, store: str) -> Callable[[str], ResultRepository]:
        """Create the result repository factory based on configuration."""
        if store == "memory":
            repository = InMemoryResultRepository()
            return lambda out_dir: repository
        if store != "files":
            logger.warning(f"Unknown result store: {store}, falling back to files")
            self._result_store = "files"
        return CsvResultRepository

    @property
    def solver(self) -> FieldSolver:
        """Get the default field solver."""
        return self._solver

    @property
    def cache_service(self) -> CacheService:
        """Get the cache service instance."""
        return self._cache_service

    @property
    def field_service(self) -> FieldService:
        """Get the field service instance."""
        return self._field_service

    @property
    def scenario_service(self) -> ScenarioService:
        """Get the scenario service instance."""
        return self._scenario_service

    @property
    def scenario_controller(self) -> ScenarioController:
        """Get the scenario controller instance."""
        return self._scenario_controller

    @property
    def system_controller(self) -> SystemController:
        """Get the system controller instance."""
        return self._system_controller
