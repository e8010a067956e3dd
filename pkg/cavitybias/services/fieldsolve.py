# cavitybias/services/fieldsolve.py
"""
Service layer for the dc electrostatic and magnetostatic boundary-value problems.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from ..domain.errors import InvalidInputError
from ..domain.field_solver import FieldSolver, LinearProblem, apply_laplacian, finite_volume_weights
from ..domain.models import (
    CavityGeometry,
    CloudSpec,
    Electrode,
    ElectrodeResponse,
    FieldMap,
    FieldStats,
    GridSpec,
    Region,
)
from ..infrastructure.cache import CacheService
from ..infrastructure.solvers.factory import SolverFactory

logger = logging.getLogger(__name__)

DEFAULT_REGION_HALF_SIZE = 1e-3
CLOUD_LATTICE_POINTS = 12  # per cloud radius


def node_coordinates(geometry: CavityGeometry, grid: GridSpec) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    return tuple(h * np.arange(n) for h, n in zip(grid.spacing(geometry), grid.shape))


def wall_mask(shape: Tuple[int, int, int]) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    mask[0, :, :] = mask[-1, :, :] = True
    mask[:, 0, :] = mask[:, -1, :] = True
    mask[:, :, 0] = mask[:, :, -1] = True
    return mask


def electrode_footprint(electrode: Electrode, geometry: CavityGeometry, grid: GridSpec) -> Tuple[np.ndarray, int]:
    """
    Nodes clamped to an electrode's potential and the number of nodes per cross-section.

    A node is clamped when its control volume intersects the electrode's circular cross-section.
    """
    coordinates = node_coordinates(geometry, grid)
    spacing = grid.spacing(geometry)
    a, b = electrode.transverse_axes
    da = np.maximum(np.abs(coordinates[a] - electrode.position[0]) - spacing[a] / 2.0, 0.0)
    db = np.maximum(np.abs(coordinates[b] - electrode.position[1]) - spacing[b] / 2.0, 0.0)
    section = da[:, None] ** 2 + db[None, :] ** 2 < electrode.radius ** 2
    if electrode.axis == "z":
        mask = np.broadcast_to(section[:, :, None], grid.shape)
    else:
        mask = np.broadcast_to(section[:, None, :], grid.shape)
    return mask.copy(), int(section.sum())


def electrostatic_problem(geometry: CavityGeometry, grid: GridSpec, v1: float, v2: float) -> LinearProblem:
    """Grounded walls with the two electrodes held at ``v1`` and ``v2``; walls win where they meet."""
    if len(geometry.electrodes) != 2:
        raise InvalidInputError(f"Electrostatics needs exactly two electrodes, got {len(geometry.electrodes)}",
                                module="fieldsolve")
    fixed = np.zeros(grid.shape, dtype=bool)
    boundary = np.zeros(grid.shape)
    for index, (electrode, potential) in enumerate(zip(geometry.electrodes, (v1, v2)), start=1):
        mask, per_section = electrode_footprint(electrode, geometry, grid)
        if per_section < 2:
            raise InvalidInputError(
                f"Electrode {index} (radius {electrode.radius * 1e3:.3g} mm) is unresolved by the "
                f"{grid.nx}x{grid.ny}x{grid.nz} grid: {per_section} node(s) per cross-section",
                module="fieldsolve")
        fixed |= mask
        boundary[mask] = potential
    walls = wall_mask(grid.shape)
    fixed |= walls
    boundary[walls] = 0.0
    return LinearProblem(grid.shape, grid.spacing(geometry), fixed, boundary, grid.tolerance, grid.max_iterations)


def aperture_masks(geometry: CavityGeometry, grid: GridSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Wall nodes open to the access holes on the z = 0 and z = Lz walls.

    Same rule as the electrode footprint: a node opens when its wall control area intersects the hole.
    """
    x, y, _ = node_coordinates(geometry, grid)
    hx, hy, _ = grid.spacing(geometry)
    lower = np.zeros(grid.shape[:2], dtype=bool)
    upper = np.zeros(grid.shape[:2], dtype=bool)
    for hole in geometry.access_holes:
        if hole.radius <= 0:
            raise InvalidInputError("Access holes must have a positive radius", module="fieldsolve")
        dx = np.maximum(np.abs(x - hole.center[0]) - hx / 2.0, 0.0)
        dy = np.maximum(np.abs(y - hole.center[1]) - hy / 2.0, 0.0)
        disk = dx[:, None] ** 2 + dy[None, :] ** 2 < hole.radius ** 2
        if not disk.any():
            raise InvalidInputError(f"Access hole of radius {hole.radius} is unresolved by the grid",
                                    module="fieldsolve")
        if hole.wall == "zmin":
            lower |= disk
        else:
            upper |= disk
    return lower, upper


def magnetostatic_problem(geometry: CavityGeometry, grid: GridSpec, b_ext: float) -> LinearProblem:
    """
    Scalar potential with flux-blocking walls and apertures held at the exterior uniform-field potential.

    ``b_ext`` is the signed exterior field along +z; the potential is psi = -b_ext * z at the apertures.
    """
    if not geometry.access_holes:
        raise InvalidInputError("Magnetostatics needs access holes", module="fieldsolve")
    lower, upper = aperture_masks(geometry, grid)
    if not lower.any() or not upper.any():
        raise InvalidInputError("Flux needs an aperture on both z walls", module="fieldsolve")
    fixed = np.zeros(grid.shape, dtype=bool)
    boundary = np.zeros(grid.shape)
    fixed[:, :, 0] = lower
    fixed[:, :, -1] = upper
    boundary[:, :, -1][upper] = -b_ext * geometry.lz
    return LinearProblem(grid.shape, grid.spacing(geometry), fixed, boundary, grid.tolerance, grid.max_iterations)


def flux_blocking_gradient(psi: np.ndarray, spacing: Sequence[float], open_lower: np.ndarray,
                           open_upper: np.ndarray) -> np.ndarray:
    """
    Gradient with a vanishing normal derivative on the walls (mirror ghost nodes).

    Aperture nodes keep a one-sided normal derivative.
    """
    gradient = np.stack(np.gradient(psi, *spacing), axis=-1)
    gradient[0, :, :, 0] = gradient[-1, :, :, 0] = 0.0
    gradient[:, 0, :, 1] = gradient[:, -1, :, 1] = 0.0
    lower = gradient[:, :, 0, 2]
    upper = gradient[:, :, -1, 2]
    lower[~open_lower] = 0.0
    upper[~open_upper] = 0.0
    return gradient


class FieldService:
    """Service for solving and caching dc field maps."""

    def __init__(self, solver: FieldSolver, cache_service: Optional[CacheService] = None):
        """
        Initialize field service.

        Args:
            solver: Default solver for grids that do not name one
            cache_service: Optional cache for solved field maps
        """
        self.solver = solver
        self.cache_service = cache_service
        logger.info(f"FieldService initialized with solver: {solver.get_solver_name()}")
        if cache_service is not None:
            logger.info(f"Cache service: {type(cache_service.provider).__name__}")

    def _solver_for(self, grid: GridSpec) -> FieldSolver:
        if grid.solver and grid.solver != self.solver.get_solver_name():
            return SolverFactory.create_solver(grid.solver)
        return self.solver

    def _cached(self, prefix: str, key: dict, build):
        if self.cache_service is not None:
            cached = self.cache_service.get(prefix, key)
            if cached is not None:
                logger.info(f"Returning cached {prefix} field map")
                return cached
        result = build()
        if self.cache_service is not None:
            self.cache_service.set(prefix, key, result)
        return result

    def solve_electrostatic(self, geometry: CavityGeometry, grid: GridSpec, v1: float, v2: float) -> FieldMap:
        """
        Solve for the electrode field with grounded walls.

        Args:
            geometry: Cavity geometry with two electrodes
            grid: Grid resolution and convergence settings
            v1: Potential of the first electrode in volts
            v2: Potential of the second electrode in volts

        Returns:
            Electric FieldMap in V/m, with the potential attached

        Raises:
            InvalidInputError: If an electrode is unresolved by the grid
            SolverError: If the solve does not converge
        """
        solver = self._solver_for(grid)
        key = {"geometry": geometry.to_dict(), "grid": grid.to_dict(), "v1": v1, "v2": v2,
               "solver": solver.get_solver_name()}

        def build():
            problem = electrostatic_problem(geometry, grid, v1, v2)
            phi, report = solver.solve(problem)
            field = -np.stack(np.gradient(phi, *problem.spacing), axis=-1)
            logger.info(f"Electrostatic solve ({v1:+g} V, {v2:+g} V) on {grid.nx}x{grid.ny}x{grid.nz}: "
                        f"{report.iterations} iterations, residual {report.residual:.2e}")
            return FieldMap(field, problem.spacing, (0.0, 0.0, 0.0), "electric", phi)

        return self._cached("electrostatic", key, build)

    def solve_magnetostatic(self, geometry: CavityGeometry, grid: GridSpec, b_ext: float,
                            direction: Sequence[float] = (0.0, 0.0, 1.0)) -> FieldMap:
        """
        Solve for the dc magnetic field inside a perfectly diamagnetic cavity.

        Args:
            geometry: Cavity geometry with access holes on both z walls
            grid: Grid resolution and convergence settings
            b_ext: Magnitude of the exterior uniform field in tesla
            direction: Unit vector of the exterior field; must lie along the hole axis z

        Returns:
            Magnetic FieldMap in tesla, with the scalar potential attached

        Raises:
            InvalidInputError: For a direction off the z axis or missing / zero-radius holes
            SolverError: If the solve does not converge
        """
        direction = np.asarray(direction, dtype=float)
        if direction.shape != (3,) or not np.isclose(np.linalg.norm(direction), 1.0, atol=1e-9):
            raise InvalidInputError(f"Direction must be a unit 3-vector, got {direction.tolist()}",
                                    module="fieldsolve")
        if abs(direction[2]) < 1.0 - 1e-9:
            raise InvalidInputError("The exterior field must point along the hole axis z", module="fieldsolve")
        signed = float(b_ext * np.sign(direction[2]))
        solver = self._solver_for(grid)
        key = {"geometry": geometry.to_dict(), "grid": grid.to_dict(), "b_ext": signed,
               "solver": solver.get_solver_name()}

        def build():
            problem = magnetostatic_problem(geometry, grid, signed)
            psi, report = solver.solve(problem)
            lower, upper = aperture_masks(geometry, grid)
            field = -flux_blocking_gradient(psi, problem.spacing, lower, upper)
            logger.info(f"Magnetostatic solve ({signed * 1e4:+g} G) on {grid.nx}x{grid.ny}x{grid.nz}: "
                        f"{report.iterations} iterations, residual {report.residual:.2e}")
            return FieldMap(field, problem.spacing, (0.0, 0.0, 0.0), "magnetic", psi)

        return self._cached("magnetostatic", key, build)


def electric_field_from_potentials(unit_first: FieldMap, unit_second: FieldMap, v1: float, v2: float) -> FieldMap:
    """Superpose unit-potential solutions: E(v1, v2) = v1 * E(1, 0) + v2 * E(0, 1)."""
    if unit_first.shape != unit_second.shape or unit_first.spacing != unit_second.spacing:
        raise InvalidInputError("Unit field maps must share a grid", module="fieldsolve")
    potential = None
    if unit_first.potential is not None and unit_second.potential is not None:
        potential = v1 * unit_first.potential + v2 * unit_second.potential
    return FieldMap(v1 * unit_first.values + v2 * unit_second.values, unit_first.spacing, unit_first.origin,
                    "electric", potential)


def default_region(field_map: FieldMap, half_size: float = DEFAULT_REGION_HALF_SIZE) -> Region:
    """Central cube of the map with the given half size."""
    return Region.centered(field_map.center, half_size)


def cloud_quadrature(field_map: FieldMap, cloud: CloudSpec, points_per_radius: int = CLOUD_LATTICE_POINTS):
    """Lattice nodes (N, 3) and equal weights (N,) filling the cloud ball."""
    if not cloud.fits_in(field_map):
        raise InvalidInputError("Cloud extends outside the field map", module="fieldsolve")
    offsets = cloud.lattice(points_per_radius)
    return cloud.center_in(field_map) + offsets, np.full(len(offsets), 1.0 / len(offsets))


def field_statistics(field_map: FieldMap, region: Optional[Region] = None,
                     cloud: Optional[CloudSpec] = None) -> FieldStats:
    """
    Center value, relative deviation over a region and cloud statistics of |F|.

    Args:
        field_map: Solved field map
        region: Box in meters; the central 2 x 2 x 2 mm cube when omitted
        cloud: Uniform cloud ball relative to the map center

    Returns:
        FieldStats

    Raises:
        InvalidInputError: For an empty region, a region or cloud outside the map, or a zero center field
    """
    magnitude = field_map.magnitude()
    center_value = float(np.linalg.norm(field_map.sample(field_map.center)))
    if center_value == 0:
        raise InvalidInputError("Field vanishes at the center; relative deviations are undefined",
                                module="fieldsolve")
    deviation = (magnitude - center_value) / center_value

    region = region or default_region(field_map)
    if not (field_map.contains(np.array(region.lower)) and field_map.contains(np.array(region.upper))):
        raise InvalidInputError("Statistics region extends outside the field map", module="fieldsolve")
    x, y, z = field_map.axes
    inside = ((x >= region.lower[0]) & (x <= region.upper[0]))[:, None, None] \
        & ((y >= region.lower[1]) & (y <= region.upper[1]))[None, :, None] \
        & ((z >= region.lower[2]) & (z <= region.upper[2]))[None, None, :]
    if not inside.any():
        raise InvalidInputError("Statistics region contains no grid nodes", module="fieldsolve")
    region_deviation = np.abs(deviation[inside])

    cloud_mean = cloud_std = None
    if cloud is not None:
        points, weights = cloud_quadrature(field_map, cloud)
        values = np.linalg.norm(field_map.sample(points), axis=-1)
        cloud_mean = float(np.dot(weights, values))
        cloud_std = float(np.sqrt(max(np.dot(weights, (values - cloud_mean) ** 2), 0.0)))

    stats = FieldStats(center_value, deviation, region, float(region_deviation.mean()),
                       float(region_deviation.max()), cloud_mean, cloud_std)
    logger.info(f"Field statistics ({field_map.kind}): center {center_value:.4g}, "
                f"mean |dF/F| {stats.region_mean_deviation:.3%}")
    return stats


def electrode_response(capacitance: float, source_impedance: float = 50.0) -> ElectrodeResponse:
    """RC time constant, 10-90% rise time and bandwidth of an electrode driven through a source impedance."""
    if capacitance <= 0 or source_impedance <= 0:
        raise InvalidInputError("Capacitance and source impedance must be positive", module="fieldsolve")
    tau = capacitance * source_impedance
    rise = 2.2 * tau
    return ElectrodeResponse(tau, rise, 0.35 / rise)


def net_flux(field_map: FieldMap, lower: Tuple[int, int, int], upper: Tuple[int, int, int]) -> float:
    """
    Net outward flux through the dual surface enclosing nodes lower..upper (inclusive indices).

    Uses the finite-volume fluxes of the attached potential, so it vanishes to solver tolerance for any
    box of free nodes.
    """
    if field_map.potential is None:
        raise InvalidInputError("Flux balance needs the map's potential", module="fieldsolve")
    weights = finite_volume_weights(field_map.shape, field_map.spacing)
    divergence = -apply_laplacian(field_map.potential, *weights)
    box = tuple(slice(lo, hi + 1) for lo, hi in zip(lower, upper))
    return float(divergence[box].sum())


def axial_flux(field_map: FieldMap, index: int) -> float:
    """Flux along +z between node planes ``index`` and ``index + 1``."""
    if field_map.potential is None:
        raise InvalidInputError("Flux needs the map's potential", module="fieldsolve")
    _, _, wz = finite_volume_weights(field_map.shape, field_map.spacing)
    psi = field_map.potential
    return float(np.sum(wz[:, :, index] * (psi[:, :, index] - psi[:, :, index + 1])))
