# cavitybias/domain/scenario.py
"""
Scenario schema (version 1).

A scenario is a YAML document with a ``kind`` and the blocks that kind needs. All quantities are SI:
meters, volts, tesla, hertz, kelvin, watts. Unknown keys are rejected so typos surface as diagnostics.
"""

import hashlib
import json
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, field_validator, model_validator

from .models import (
    AccessHole,
    CavityGeometry,
    CloudSpec,
    Electrode,
    GridSpec,
    MaterialSpec,
    ModeIndex,
    RodInsertion,
    RodPort,
)
from .spectro_models import DEFAULT_POLARIZABILITY_DIFFERENCE, RydbergSystem

SCENARIO_KINDS = ("modes", "fields", "losses", "tuning", "spectrum", "transmission")

REQUIRED_BLOCKS: Dict[str, Tuple[str, ...]] = {
    "modes": ("geometry",),
    "fields": ("geometry", "fields"),
    "losses": ("geometry", "material", "losses"),
    "tuning": ("geometry", "tuning"),
    "spectrum": ("geometry", "fields", "cloud", "spectrum"),
    "transmission": ("transmission",),
}


class Block(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GeometryBlock(Block):
    lx: PositiveFloat = 25.6e-3
    ly: PositiveFloat = 7e-3
    lz: PositiveFloat = 14e-3
    electrode_axis: Literal["y", "z"] = "z"
    electrode_radius: PositiveFloat = 0.25e-3
    # cross-section centers; the TE301 node planes in the mid-plane when omitted
    electrode_positions: Optional[List[Tuple[float, float]]] = None
    hole_radius: float = Field(1.5e-3, ge=0)
    port_diameter: PositiveFloat = 2.3e-3

    def to_geometry(self, v1: float = 0.0, v2: float = 0.0) -> CavityGeometry:
        if self.electrode_positions is not None:
            positions = [tuple(p) for p in self.electrode_positions]
        elif self.electrode_axis == "z":
            positions = [(self.lx / 3, self.ly / 2), (2 * self.lx / 3, self.ly / 2)]
        else:
            positions = [(self.lx / 3, self.lz / 2), (2 * self.lx / 3, self.lz / 2)]
        potentials = [v1, v2] + [0.0] * max(len(positions) - 2, 0)
        electrodes = [Electrode(p, self.electrode_radius, v, self.electrode_axis)
                      for p, v in zip(positions, potentials)]
        holes = []
        if self.hole_radius > 0:
            holes = [AccessHole((self.lx / 2, self.ly / 2), self.hole_radius, wall) for wall in ("zmin", "zmax")]
        port = RodPort(self.port_diameter, (self.ly / 2, self.lz / 2), "xmin")
        return CavityGeometry(self.lx, self.ly, self.lz, electrodes, holes, port)


class MaterialBlock(Block):
    name: str = "niobium"
    conductivity: Optional[PositiveFloat] = None
    rrr: Optional[PositiveFloat] = None
    superconductor: bool = True
    trapped_field: float = Field(0.0, ge=0)

    def to_material(self) -> MaterialSpec:
        return MaterialSpec(self.name, self.conductivity, self.rrr, self.superconductor, self.trapped_field)


class GridBlock(Block):
    nx: int = Field(64, ge=GridSpec.MIN_RESOLUTION)
    ny: int = Field(32, ge=GridSpec.MIN_RESOLUTION)
    nz: int = Field(48, ge=GridSpec.MIN_RESOLUTION)
    tolerance: float = Field(1e-6, gt=0, le=1e-3)
    max_iterations: PositiveInt = 20000
    solver: Optional[Literal["cg", "sor"]] = None

    def to_grid(self) -> GridSpec:
        return GridSpec(self.nx, self.ny, self.nz, self.tolerance, self.max_iterations, self.solver)


class FieldsBlock(Block):
    v1: float = -1.0
    v2: float = 1.0
    b_ext: float = Field(1e-3, ge=0)
    solve: List[Literal["electric", "magnetic"]] = ["electric", "magnetic"]
    region_half_size: PositiveFloat = 1e-3
    export_maps: bool = False
    electrode_capacitance: PositiveFloat = 4e-12
    source_impedance: PositiveFloat = 50.0


class CloudBlock(Block):
    diameter: PositiveFloat = 1.1e-3
    offset: Tuple[float, float, float] = (0.7e-3, 0.0, 0.0)

    def to_cloud(self) -> CloudSpec:
        return CloudSpec(self.diameter, self.offset)


class SpectrumBlock(Block):
    field_free_frequency: PositiveFloat = 20.542e9
    offset_plus: float = -2.5e6
    offset_minus: float = -0.5e6
    polarizability_difference: float = DEFAULT_POLARIZABILITY_DIFFERENCE
    g_l: PositiveFloat = 1.0
    homogeneous_width: PositiveFloat = 1.0e6
    paschen_back_threshold: PositiveFloat = 3e-4
    # field per coil current used to generate the synthetic spectra, G/A
    gauss_per_ampere: PositiveFloat = 5.1
    currents: List[float] = [0.6078, 0.9804, 1.4118, 1.9216]
    detuning_start: float = -30e6
    detuning_stop: float = 25e6
    n_points: int = Field(551, ge=20)
    n_samples: int = Field(20000, ge=1000)
    fit_model: Literal["auto", "double", "single"] = "auto"
    field_map_path: Optional[str] = None
    magnetic_profile: bool = False
    coil_radius: Optional[PositiveFloat] = 0.3
    coil_turns: Optional[PositiveInt] = None

    @field_validator("currents")
    @classmethod
    def _non_negative_currents(cls, value: List[float]) -> List[float]:
        if any(c < 0 for c in value):
            raise ValueError("coil currents must be non-negative")
        return value

    @model_validator(mode="after")
    def _ordered_grid(self) -> "SpectrumBlock":
        if self.detuning_stop <= self.detuning_start:
            raise ValueError("detuning_stop must exceed detuning_start")
        return self

    def to_system(self) -> RydbergSystem:
        return RydbergSystem(self.field_free_frequency, self.offset_plus, self.offset_minus,
                             self.polarizability_difference, self.g_l, self.homogeneous_width,
                             self.paschen_back_threshold)


class TransmissionBlock(Block):
    frequency: PositiveFloat = 20.558e9
    kappa: PositiveFloat = 12.4e3
    kappa_ext: PositiveFloat = 651.0
    temperature: float = Field(3.0, ge=0)
    noise: float = Field(0.02, ge=0)
    span_linewidths: float = Field(10.0, ge=3.0)
    n_points: int = Field(201, ge=15)
    photon_numbers: List[PositiveFloat] = [1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8]

    @model_validator(mode="after")
    def _physical_coupling(self) -> "TransmissionBlock":
        if 2.0 * self.kappa_ext > self.kappa:
            raise ValueError("kappa_ext must not exceed kappa / 2")
        return self


class RodBlock(Block):
    name: str
    material: Literal["dielectric", "conductor"]
    permittivity: float = Field(9.0, ge=1.0)
    diameter: PositiveFloat = 1.9e-3
    max_depth: PositiveFloat
    n_depths: int = Field(22, ge=2)
    depolarize: bool = True

    def to_rod(self) -> RodInsertion:
        return RodInsertion(self.material, self.diameter, 0.0, self.permittivity, depolarize=self.depolarize)


class TuningBlock(Block):
    mode: str = "TE301"
    rods: List[RodBlock] = [
        RodBlock(name="sapphire", material="dielectric", permittivity=9.0, max_depth=4.2e-3),
        RodBlock(name="niobium", material="conductor", max_depth=1.55e-3),
    ]

    @field_validator("mode")
    @classmethod
    def _parse_mode(cls, value: str) -> str:
        ModeIndex.parse(value)
        return value.upper()


class LossesBlock(Block):
    mode: str = "TE301"
    base_linewidth: float = Field(11.9e3, ge=0)
    transmission_amplitude: float = Field(0.105, ge=0, lt=1)
    frequency: Optional[PositiveFloat] = 20.59e9
    linewidth_increases: List[PositiveFloat] = [637e3, 46.3e3]
    trapped_fields: List[float] = [1e-3, 2e-3, 20e-3]

    @field_validator("mode")
    @classmethod
    def _parse_mode(cls, value: str) -> str:
        ModeIndex.parse(value)
        return value.upper()


class ModesBlock(Block):
    modes: List[str] = ["TE101", "TE201", "TE301"]
    measured: Dict[str, PositiveFloat] = {"TE101": 12.08e9, "TE201": 15.86e9, "TE301": 20.59e9}
    geometry_factor: bool = True

    @field_validator("modes")
    @classmethod
    def _parse_modes(cls, value: List[str]) -> List[str]:
        return [ModeIndex.parse(label).label for label in value]


class OutputBlock(Block):
    out_dir: Optional[str] = None
    formats: List[Literal["csv", "summary"]] = ["csv", "summary"]


class Scenario(Block):
    """Validated scenario document."""
    schema_version: Literal[1]
    kind: Literal["modes", "fields", "losses", "tuning", "spectrum", "transmission"]
    seed: Optional[int] = None
    geometry: Optional[GeometryBlock] = None
    material: Optional[MaterialBlock] = None
    grid: GridBlock = GridBlock()
    fields: Optional[FieldsBlock] = None
    cloud: Optional[CloudBlock] = None
    spectrum: Optional[SpectrumBlock] = None
    transmission: Optional[TransmissionBlock] = None
    tuning: Optional[TuningBlock] = None
    losses: Optional[LossesBlock] = None
    modes: ModesBlock = ModesBlock()
    output: OutputBlock = OutputBlock()

    @model_validator(mode="after")
    def _required_blocks(self) -> "Scenario":
        missing = [block for block in REQUIRED_BLOCKS[self.kind] if getattr(self, block) is None]
        if missing:
            raise ValueError(f"scenario kind '{self.kind}' requires the missing block(s): {', '.join(missing)}")
        if self.kind == "spectrum" and self.seed is None:
            raise ValueError("scenario kind 'spectrum' requires a seed")
        if self.kind == "transmission" and self.transmission.noise > 0 and self.seed is None:
            raise ValueError("scenario kind 'transmission' with noise requires a seed")
        return self

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON of every semantic field (the output block is excluded)."""
        payload = self.model_dump(mode="json", exclude={"output"})
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()
