# tests/conftest.py
from pathlib import Path

import numpy as np
import pytest

from cavitybias.domain.models import FieldMap, GridSpec, reference_geometry
from cavitybias.infrastructure.solvers.conjugate_gradient import ConjugateGradientSolver
from cavitybias.services.fieldsolve import FieldService


@pytest.fixture(scope="session")
def scenario_dir():
    return Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture(scope="session")
def geometry():
    return reference_geometry()


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(24, 16, 16)


@pytest.fixture(scope="session")
def field_service():
    return FieldService(ConjugateGradientSolver())


@pytest.fixture(scope="session")
def electric_map(field_service, geometry, small_grid):
    return field_service.solve_electrostatic(geometry, small_grid, -1.0, 1.0)


@pytest.fixture(scope="session")
def magnetic_map(field_service, geometry, small_grid):
    return field_service.solve_magnetostatic(geometry, small_grid, 1e-3)


@pytest.fixture(scope="session")
def reference_grid():
    return GridSpec()


@pytest.fixture(scope="session")
def drive_map(field_service, geometry, reference_grid):
    """Second electrode at 1 V, first grounded, on the default grid."""
    return field_service.solve_electrostatic(geometry, reference_grid, 0.0, 1.0)


@pytest.fixture(scope="session")
def reference_magnetic_map(field_service, geometry, reference_grid):
    """10 G applied along z, on the default grid."""
    return field_service.solve_magnetostatic(geometry, reference_grid, 1e-3)


@pytest.fixture
def uniform_map():
    """Factory for maps carrying the same field along x on every node."""
    def build(magnitude: float, kind: str = "electric", n: int = 11, spacing: float = 1e-3) -> FieldMap:
        values = np.zeros((n, n, n, 3))
        values[..., 0] = magnitude
        return FieldMap(values, (spacing, spacing, spacing), kind=kind)
    return build
