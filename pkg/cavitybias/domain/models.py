# cavitybias/domain/models.py
"""
Domain models for the cavity simulator.
Contains the cavity geometry, mode descriptors, dc field maps and loss bookkeeping types.
All quantities are SI (meters, volts, tesla, hertz, ohms) unless a field name says otherwise.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import InvalidInputError

Vector3 = Tuple[float, float, float]

_AXES = ("x", "y", "z")


@dataclass(frozen=True)
class Electrode:
    """
    Cylindrical electrode spanning the cavity along ``axis``.

    ``position`` is the center of the circular cross-section in the plane normal to the axis:
    (x, z) for an electrode along y, (x, y) for an electrode along z.
    """
    position: Tuple[float, float]
    radius: float
    potential: float = 0.0
    axis: str = "y"

    def __post_init__(self):
        if self.axis not in ("y", "z"):
            raise InvalidInputError(f"Electrode axis must be 'y' or 'z', got {self.axis!r}", module="geometry")
        if self.radius <= 0:
            raise InvalidInputError(f"Electrode radius must be positive, got {self.radius}", module="geometry")

    @property
    def transverse_axes(self) -> Tuple[int, int]:
        """Indices of the two axes spanning the cross-section."""
        return (0, 2) if self.axis == "y" else (0, 1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "position_m": list(self.position),
            "radius_m": self.radius,
            "potential_V": self.potential,
            "axis": self.axis,
        }


@dataclass(frozen=True)
class AccessHole:
    """Circular aperture in one of the two z-facing walls."""
    center: Tuple[float, float]  # (x, y)
    radius: float
    wall: str = "zmin"

    def __post_init__(self):
        if self.wall not in ("zmin", "zmax"):
            raise InvalidInputError(f"Access hole wall must be 'zmin' or 'zmax', got {self.wall!r}", module="geometry")
        if self.radius < 0:
            raise InvalidInputError(f"Access hole radius must be non-negative, got {self.radius}", module="geometry")

    def to_dict(self) -> Dict[str, Any]:
        return {"center_m": list(self.center), "radius_m": self.radius, "wall": self.wall}


@dataclass(frozen=True)
class RodPort:
    """Side port through which a tuning rod enters the cavity along x."""
    diameter: float
    center: Tuple[float, float]  # (y, z)
    face: str = "xmin"
    insertion_depth: float = 0.0
    material: str = "sapphire"

    def __post_init__(self):
        if self.face not in ("xmin", "xmax"):
            raise InvalidInputError(f"Rod port face must be 'xmin' or 'xmax', got {self.face!r}", module="geometry")
        if self.diameter <= 0:
            raise InvalidInputError(f"Rod port diameter must be positive, got {self.diameter}", module="geometry")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "diameter_m": self.diameter,
            "center_m": list(self.center),
            "face": self.face,
            "insertion_depth_m": self.insertion_depth,
            "material": self.material,
        }


@dataclass(frozen=True)
class CavityGeometry:
    """Rectangular cavity box with electrodes, access holes and an optional rod port."""
    lx: float
    ly: float
    lz: float
    electrodes: Tuple[Electrode, ...] = ()
    access_holes: Tuple[AccessHole, ...] = ()
    rod_port: Optional[RodPort] = None

    def __post_init__(self):
        object.__setattr__(self, "electrodes", tuple(self.electrodes))
        object.__setattr__(self, "access_holes", tuple(self.access_holes))
        for name, value in (("lx", self.lx), ("ly", self.ly), ("lz", self.lz)):
            if not value > 0:
                raise InvalidInputError(f"Cavity dimension {name} must be positive, got {value}", module="geometry")
        for electrode in self.electrodes:
            self._validate_electrode(electrode)
        for hole in self.access_holes:
            self._validate_hole(hole)
        if self.rod_port is not None:
            self._validate_rod_port(self.rod_port)

    @property
    def dimensions(self) -> np.ndarray:
        return np.array([self.lx, self.ly, self.lz])

    @property
    def volume(self) -> float:
        return self.lx * self.ly * self.lz

    @property
    def center(self) -> np.ndarray:
        return self.dimensions / 2.0

    def scaled(self, factor: float) -> "CavityGeometry":
        """Return a copy with every length multiplied by ``factor``."""
        electrodes = tuple(
            Electrode((e.position[0] * factor, e.position[1] * factor), e.radius * factor, e.potential, e.axis)
            for e in self.electrodes
        )
        holes = tuple(
            AccessHole((h.center[0] * factor, h.center[1] * factor), h.radius * factor, h.wall)
            for h in self.access_holes
        )
        port = None
        if self.rod_port is not None:
            p = self.rod_port
            port = RodPort(p.diameter * factor, (p.center[0] * factor, p.center[1] * factor),
                           p.face, p.insertion_depth * factor, p.material)
        return CavityGeometry(self.lx * factor, self.ly * factor, self.lz * factor, electrodes, holes, port)

    def _validate_electrode(self, electrode: Electrode):
        dims = self.dimensions
        a, b = electrode.transverse_axes
        for axis, coordinate in zip((a, b), electrode.position):
            if not 0.0 < coordinate < dims[axis]:
                raise InvalidInputError(
                    f"Electrode coordinate {_AXES[axis]}={coordinate} lies outside the wall face", module="geometry")
        limit = min(dims[a], dims[b]) / 10.0
        if electrode.radius >= limit:
            raise InvalidInputError(
                f"Electrode radius {electrode.radius} must be below {limit} (a tenth of the cross-section)",
                module="geometry")

    def _validate_hole(self, hole: AccessHole):
        x, y = hole.center
        if not (0.0 < x < self.lx and 0.0 < y < self.ly):
            raise InvalidInputError(f"Access hole center {hole.center} lies outside the z wall", module="geometry")
        for electrode in self.electrodes:
            # only electrodes along z reach the z walls
            if electrode.axis != "z":
                continue
            distance = np.hypot(x - electrode.position[0], y - electrode.position[1])
            if distance < hole.radius + electrode.radius:
                raise InvalidInputError("Access hole overlaps an electrode", module="geometry")

    def _validate_rod_port(self, port: RodPort):
        y, z = port.center
        r = port.diameter / 2.0
        if not (r < y < self.ly - r and r < z < self.lz - r):
            raise InvalidInputError(f"Rod port at {port.center} does not fit in the x wall", module="geometry")
        if not 0.0 <= port.insertion_depth <= self.lx:
            raise InvalidInputError(f"Rod insertion depth {port.insertion_depth} outside [0, Lx]", module="geometry")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lx_m": self.lx,
            "ly_m": self.ly,
            "lz_m": self.lz,
            "electrodes": [e.to_dict() for e in self.electrodes],
            "access_holes": [h.to_dict() for h in self.access_holes],
            "rod_port": self.rod_port.to_dict() if self.rod_port else None,
        }


@dataclass(frozen=True)
class ModeIndex:
    """Mode numbers (m, n, l) along x, y, z."""
    m: int
    n: int
    l: int

    def __post_init__(self):
        for name, value in (("m", self.m), ("n", self.n), ("l", self.l)):
            if int(value) != value or value < 0:
                raise InvalidInputError(f"Mode number {name} must be a non-negative integer, got {value}",
                                        module="geometry")

    @property
    def label(self) -> str:
        return f"TE{self.m}{self.n}{self.l}"

    @classmethod
    def parse(cls, label: str) -> "ModeIndex":
        """Parse labels like 'TE301'."""
        digits = label.upper().removeprefix("TE")
        if len(digits) != 3 or not digits.isdigit():
            raise InvalidInputError(f"Cannot parse mode label {label!r}", module="geometry")
        return cls(int(digits[0]), int(digits[1]), int(digits[2]))

    def to_dict(self) -> Dict[str, Any]:
        return {"m": self.m, "n": self.n, "l": self.l, "label": self.label}


TE101 = ModeIndex(1, 0, 1)
TE201 = ModeIndex(2, 0, 1)
TE301 = ModeIndex(3, 0, 1)


@dataclass(frozen=True)
class ModeField:
    """Analytic TE_m0l field of a geometry, normalized to peak |E| = 1."""
    mode: ModeIndex
    geometry: CavityGeometry


@dataclass(frozen=True)
class GridSpec:
    """Finite-difference grid: ``nx`` cells along x (``nx + 1`` nodes) and so on."""
    nx: int = 64
    ny: int = 32
    nz: int = 48
    tolerance: float = 1e-6
    max_iterations: int = 20000
    solver: Optional[str] = None

    MIN_RESOLUTION = 16

    def __post_init__(self):
        for name, value in (("nx", self.nx), ("ny", self.ny), ("nz", self.nz)):
            if value < self.MIN_RESOLUTION:
                raise InvalidInputError(
                    f"Grid resolution {name}={value} is below the minimum of {self.MIN_RESOLUTION}",
                    module="fieldsolve")
        if not 0.0 < self.tolerance <= 1e-3:
            raise InvalidInputError(f"Tolerance must lie in (0, 1e-3], got {self.tolerance}", module="fieldsolve")
        if self.max_iterations < 1:
            raise InvalidInputError("max_iterations must be positive", module="fieldsolve")

    @property
    def shape(self) -> Tuple[int, int, int]:
        """Number of nodes per axis."""
        return (self.nx + 1, self.ny + 1, self.nz + 1)

    def spacing(self, geometry: CavityGeometry) -> Tuple[float, float, float]:
        return (geometry.lx / self.nx, geometry.ly / self.ny, geometry.lz / self.nz)

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.nx * factor, self.ny * factor, self.nz * factor,
                        self.tolerance, self.max_iterations, self.solver)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nx": self.nx, "ny": self.ny, "nz": self.nz,
            "tolerance": self.tolerance,
            "max_iterations": self.max_iterations,
            "solver": self.solver,
        }


@dataclass(eq=False)
class FieldMap:
    """
    Vector field sampled on the nodes of a regular grid.

    ``values`` has shape (Nx, Ny, Nz, 3); units are V/m for ``kind == "electric"``
    and tesla for ``kind == "magnetic"``.
    """
    values: np.ndarray
    spacing: Vector3
    origin: Vector3 = (0.0, 0.0, 0.0)
    kind: str = "electric"
    potential: Optional[np.ndarray] = None
    _interpolator: Optional[RegularGridInterpolator] = field(default=None, init=False, repr=False)

    KINDS = ("electric", "magnetic")

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 4 or self.values.shape[-1] != 3:
            raise InvalidInputError(f"Field values must have shape (Nx, Ny, Nz, 3), got {self.values.shape}",
                                    module="fieldsolve")
        if self.kind not in self.KINDS:
            raise InvalidInputError(f"Unknown field kind {self.kind!r}", module="fieldsolve")
        self.spacing = tuple(float(h) for h in self.spacing)
        self.origin = tuple(float(o) for o in self.origin)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.values.shape[:3]

    @property
    def axes(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(o + h * np.arange(n) for o, h, n in zip(self.origin, self.spacing, self.shape))

    @property
    def lower(self) -> np.ndarray:
        return np.array(self.origin)

    @property
    def upper(self) -> np.ndarray:
        return np.array(self.origin) + np.array(self.spacing) * (np.array(self.shape) - 1)

    @property
    def center(self) -> np.ndarray:
        return (self.lower + self.upper) / 2.0

    def magnitude(self) -> np.ndarray:
        return np.linalg.norm(self.values, axis=-1)

    def contains(self, points: np.ndarray) -> bool:
        points = np.atleast_2d(points)
        tol = 1e-12 * float(np.max(self.upper - self.lower))
        return bool(np.all(points >= self.lower - tol) and np.all(points <= self.upper + tol))

    def sample(self, points: np.ndarray) -> np.ndarray:
        """Trilinear interpolation of the field at ``points`` (shape (..., 3))."""
        points = np.asarray(points, dtype=float)
        if not self.contains(points.reshape(-1, 3)):
            raise InvalidInputError("Sample points lie outside the field map", module="fieldsolve")
        if self._interpolator is None:
            self._interpolator = RegularGridInterpolator(self.axes, self.values, method="linear")
        clipped = np.clip(points, self.lower, self.upper)
        return self._interpolator(clipped.reshape(-1, 3)).reshape(points.shape[:-1] + (3,))

    def scaled(self, factor: float) -> "FieldMap":
        potential = None if self.potential is None else self.potential * factor
        return FieldMap(self.values * factor, self.spacing, self.origin, self.kind, potential)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "shape": list(self.shape),
            "spacing_m": list(self.spacing),
            "origin_m": list(self.origin),
        }


@dataclass(frozen=True)
class Region:
    """Axis-aligned box in meters."""
    lower: Vector3
    upper: Vector3

    def __post_init__(self):
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise InvalidInputError(f"Region lower corner {self.lower} exceeds upper {self.upper}", module="fieldsolve")

    @classmethod
    def centered(cls, center, half_size) -> "Region":
        center = np.asarray(center, dtype=float)
        half = np.broadcast_to(np.asarray(half_size, dtype=float), (3,))
        return cls(tuple(center - half), tuple(center + half))

    def to_dict(self) -> Dict[str, Any]:
        return {"lower_m": list(self.lower), "upper_m": list(self.upper)}


@dataclass(frozen=True)
class CloudSpec:
    """Atom cloud filling a uniform ball; ``diameter`` is the hard diameter."""
    diameter: float
    center_offset: Vector3 = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.diameter <= 0:
            raise InvalidInputError(f"Cloud diameter must be positive, got {self.diameter}", module="fieldsolve")

    @property
    def radius(self) -> float:
        return self.diameter / 2.0

    def center_in(self, field_map: FieldMap) -> np.ndarray:
        return field_map.center + np.asarray(self.center_offset, dtype=float)

    def fits_in(self, field_map: FieldMap) -> bool:
        """True when the whole ball lies inside the map box."""
        reach = self.radius * np.vstack([np.eye(3), -np.eye(3)])
        return field_map.contains(self.center_in(field_map) + reach)

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Displacements (count, 3) distributed uniformly over the ball."""
        directions = rng.standard_normal((count, 3))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        return directions * (self.radius * np.cbrt(rng.random(count)))[:, None]

    def lattice(self, points_per_radius: int) -> np.ndarray:
        """Midpoint lattice displacements filling the ball, equal weight each."""
        h = self.radius / points_per_radius
        ticks = (np.arange(-points_per_radius, points_per_radius) + 0.5) * h
        offsets = np.stack(np.meshgrid(ticks, ticks, ticks, indexing="ij"), axis=-1).reshape(-1, 3)
        return offsets[np.einsum("ij,ij->i", offsets, offsets) <= self.radius ** 2]

    def to_dict(self) -> Dict[str, Any]:
        return {"diameter_m": self.diameter, "center_offset_m": list(self.center_offset)}


@dataclass
class FieldStats:
    """Field-magnitude statistics of a FieldMap."""
    center_value: float
    relative_deviation_map: np.ndarray
    region: Region
    region_mean_deviation: float
    region_max_deviation: float
    cloud_mean: Optional[float] = None
    cloud_std: Optional[float] = None

    @property
    def cloud_inhomogeneity(self) -> Optional[float]:
        if self.cloud_mean is None or self.cloud_mean == 0:
            return None
        return self.cloud_std / self.cloud_mean

    def to_dict(self) -> Dict[str, Any]:
        return {
            "center_value": self.center_value,
            "region": self.region.to_dict(),
            "region_mean_relative_deviation": self.region_mean_deviation,
            "region_max_relative_deviation": self.region_max_deviation,
            "cloud_mean": self.cloud_mean,
            "cloud_std": self.cloud_std,
            "cloud_relative_std": self.cloud_inhomogeneity,
        }


@dataclass(frozen=True)
class ElectrodeResponse:
    """RC response of an electrode driven through a source impedance."""
    time_constant: float
    rise_time: float
    bandwidth: float

    def to_dict(self) -> Dict[str, Any]:
        return {"time_constant_s": self.time_constant, "rise_time_s": self.rise_time, "bandwidth_Hz": self.bandwidth}


@dataclass(frozen=True)
class MaterialSpec:
    """Electrode material: a normal conductor (conductivity or RRR) or a superconductor."""
    name: str = "niobium"
    conductivity: Optional[float] = None
    rrr: Optional[float] = None
    superconductor: bool = False
    trapped_field: float = 0.0

    def __post_init__(self):
        if self.trapped_field < 0:
            raise InvalidInputError(f"Trapped field must be non-negative, got {self.trapped_field}", module="lossmodel")
        if not self.superconductor:
            if self.conductivity is None and self.rrr is None:
                raise InvalidInputError(f"Normal-conducting material {self.name!r} needs a conductivity or RRR",
                                        module="lossmodel")
            if self.conductivity is not None and self.conductivity <= 0:
                raise InvalidInputError(f"Conductivity must be positive, got {self.conductivity}", module="lossmodel")
            if self.rrr is not None and self.rrr <= 0:
                raise InvalidInputError(f"RRR must be positive, got {self.rrr}", module="lossmodel")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "conductivity_S_per_m": self.conductivity,
            "rrr": self.rrr,
            "superconductor": self.superconductor,
            "trapped_field_T": self.trapped_field,
        }


@dataclass(frozen=True)
class QualityFactors:
    loaded_q: float
    internal_q: float

    def to_dict(self) -> Dict[str, Any]:
        return {"loaded_q": self.loaded_q, "internal_q": self.internal_q}


@dataclass(frozen=True)
class QualityLimit:
    """Q limit from a residual resistance; ``limited`` is False when no finite limit exists."""
    limited: bool
    q: Optional[float]
    geometry_factor: float
    resistance: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "limited": self.limited,
            "q": self.q if self.limited else "no-limit",
            "geometry_factor_ohm": self.geometry_factor,
            "resistance_ohm": self.resistance,
        }


@dataclass(frozen=True)
class LossBudget:
    """Linewidth decomposition of one mode, all linewidths as kappa/2pi in Hz."""
    mode: ModeIndex
    frequency: float
    base_linewidth: float
    electrode_linewidth: float
    trapped_flux_linewidth: float
    coupling_linewidth: float
    total_linewidth: float
    loaded_q: float
    internal_q: float

    COMPONENTS = ("base_linewidth", "electrode_linewidth", "trapped_flux_linewidth", "coupling_linewidth")

    @property
    def internal_linewidth(self) -> float:
        return self.base_linewidth + self.electrode_linewidth + self.trapped_flux_linewidth

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode.label,
            "frequency_Hz": self.frequency,
            "base_linewidth_Hz": self.base_linewidth,
            "electrode_linewidth_Hz": self.electrode_linewidth,
            "trapped_flux_linewidth_Hz": self.trapped_flux_linewidth,
            "coupling_linewidth_Hz": self.coupling_linewidth,
            "total_linewidth_Hz": self.total_linewidth,
            "loaded_q": self.loaded_q,
            "internal_q": self.internal_q,
        }


@dataclass(frozen=True)
class RodInsertion:
    """
    Tuning rod entering through the x-facing port.

    ``material`` is "dielectric" (with ``permittivity``) or "conductor".
    ``depolarize`` applies the thin-cylinder depolarization to field components transverse to the rod.
    """
    material: str
    diameter: float
    insertion_depth: float
    permittivity: float = 1.0
    face: str = "xmin"
    center: Optional[Tuple[float, float]] = None  # (y, z); defaults to the port center
    depolarize: bool = True

    def __post_init__(self):
        if self.material not in ("dielectric", "conductor"):
            raise InvalidInputError(f"Rod material must be 'dielectric' or 'conductor', got {self.material!r}",
                                    module="tuning")
        if self.diameter <= 0:
            raise InvalidInputError(f"Rod diameter must be positive, got {self.diameter}", module="tuning")
        if self.insertion_depth < 0:
            raise InvalidInputError(f"Insertion depth must be non-negative, got {self.insertion_depth}",
                                    module="tuning")
        if self.material == "dielectric" and self.permittivity < 1.0:
            raise InvalidInputError(f"Relative permittivity must be >= 1, got {self.permittivity}", module="tuning")
        if self.face not in ("xmin", "xmax"):
            raise InvalidInputError(f"Rod face must be 'xmin' or 'xmax', got {self.face!r}", module="tuning")

    def at_depth(self, depth: float) -> "RodInsertion":
        return RodInsertion(self.material, self.diameter, depth, self.permittivity, self.face, self.center,
                            self.depolarize)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "material": self.material,
            "diameter_m": self.diameter,
            "insertion_depth_m": self.insertion_depth,
            "permittivity": self.permittivity,
            "face": self.face,
            "center_m": list(self.center) if self.center else None,
            "depolarize": self.depolarize,
        }


@dataclass(frozen=True)
class TuningShift:
    depth: float
    frequency: float
    shift: float
    non_perturbative: bool

    @property
    def relative_shift(self) -> float:
        return self.shift / self.frequency

    def to_dict(self) -> Dict[str, Any]:
        return {
            "insertion_depth_m": self.depth,
            "frequency_Hz": self.frequency,
            "shift_Hz": self.shift,
            "relative_shift": self.relative_shift,
            "non_perturbative": self.non_perturbative,
        }


def reference_geometry(electrode_axis: str = "z") -> CavityGeometry:
    """Reference 25.6 x 7 x 14 mm cavity with node electrodes, access holes and side port."""
    lx, ly, lz = 25.6e-3, 7e-3, 14e-3
    if electrode_axis == "z":
        positions = ((lx / 3, ly / 2), (2 * lx / 3, ly / 2))
    else:
        positions = ((lx / 3, lz / 2), (2 * lx / 3, lz / 2))
    electrodes = (
        Electrode(positions[0], 0.25e-3, -1.0, electrode_axis),
        Electrode(positions[1], 0.25e-3, 1.0, electrode_axis),
    )
    holes = (
        AccessHole((lx / 2, ly / 2), 1.5e-3, "zmin"),
        AccessHole((lx / 2, ly / 2), 1.5e-3, "zmax"),
    )
    port = RodPort(2.3e-3, (ly / 2, lz / 2), "xmin", 0.0, "sapphire")
    return CavityGeometry(lx, ly, lz, electrodes, holes, port)
