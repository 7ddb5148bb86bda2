"""Scenario documents.

A scenario is a single JSON document validated by the :class:`Scenario`
model. Bundled scenarios live in ``symcurrents/resources/scenarios``.
"""

import dataclasses
import json
from pathlib import Path
from typing import Annotated
from typing import Literal

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import PrivateAttr
from pydantic import model_validator

from symcurrents.conservation import PairingKind
from symcurrents.conservation import pairing_class
from symcurrents.grid import BoundaryCondition
from symcurrents.grid import ComplexField
from symcurrents.grid import Grid
from symcurrents.grid import RealField
from symcurrents.grid import norm
from symcurrents.hamiltonian import Hamiltonian
from symcurrents.lagrangian import PhaseDilation
from symcurrents.potentials import evaluate_preset
from symcurrents.propagator import KineticSymbol
from symcurrents.propagator import PropagationMethod
from symcurrents.propagator import StationaryState
from symcurrents.propagator import stationary_state
from symcurrents.snapshots import read_field
from symcurrents.symmetry import SpatialTransform
from symcurrents.symmetry import TransformKind
from symcurrents.symmetry import make_transform
from symcurrents.utils import ConfigError
from symcurrents.utils import list_json_resources
from symcurrents.utils import load_json_resource

SCENARIO_DIRECTORY = "scenarios"

STRICT = ConfigDict(extra="forbid")


def _per_axis(value, dim: int, name: str) -> list[float]:
    if isinstance(value, int | float):
        return [float(value)] * dim
    if len(value) != dim:
        raise ConfigError(f"{name} needs {dim} entries, got {len(value)}")
    return [float(v) for v in value]


def _resolve(path: Path, base_dir: Path | None) -> Path:
    if path.is_absolute() or base_dir is None:
        return path
    return base_dir / path


class GridSpec(BaseModel):
    """Box ``[lower, upper]`` per axis sampled with ``n`` points."""

    model_config = STRICT

    lower: list[float] = Field(min_length=1, max_length=2)
    upper: list[float] = Field(min_length=1, max_length=2)
    n: list[Annotated[int, Field(ge=4)]] = Field(min_length=1, max_length=2)
    bc: list[BoundaryCondition] = Field(min_length=1, max_length=2)

    @model_validator(mode="after")
    def check_axes(self):
        if not len(self.lower) == len(self.upper) == len(self.n) == len(self.bc):
            raise ValueError("lower, upper, n and bc need one entry per axis")
        if any(u <= lo for lo, u in zip(self.lower, self.upper, strict=True)):
            raise ValueError("upper bounds must exceed lower bounds")
        return self

    def build(self, refine: int = 0) -> Grid:
        grid = Grid.from_bounds(self.lower, self.upper, self.n, self.bc)
        for _ in range(refine):
            grid = grid.refined()
        return grid


class PotentialSpec(BaseModel):
    """A preset name with its parameters, or a snapshot file of real samples.

    Preset parameters are given as extra keys, for instance
    ``{"preset": "harmonic", "omega": 1.0}``.
    """

    model_config = ConfigDict(extra="allow")

    preset: str | None = "zero"
    file: Path | None = None

    @model_validator(mode="after")
    def check_source(self):
        if self.file is not None and self.model_extra:
            raise ValueError("file potentials take no preset parameters")
        return self

    def build(self, grid: Grid, base_dir: Path | None = None) -> RealField:
        if self.file is None:
            return evaluate_preset(self.preset, grid, **(self.model_extra or {}))
        field = read_field(_resolve(self.file, base_dir))
        if field.grid != grid:
            raise ConfigError(f"{self.file}: sampled on another grid")
        if np.any(field.imag):
            raise ConfigError(f"{self.file}: potential samples must be real")
        return RealField(grid, field.real)


class HamiltonianConfig(BaseModel):
    model_config = STRICT

    V: PotentialSpec = PotentialSpec()
    W: PotentialSpec = PotentialSpec()

    def build(self, grid: Grid, base_dir: Path | None = None) -> Hamiltonian:
        return Hamiltonian(grid, self.V.build(grid, base_dir), self.W.build(grid, base_dir))


class TransformSpec(BaseModel):
    """Spatial transform.

    Translations take ``offset`` in cells of the configured grid or a
    physical ``distance``.
    """

    model_config = STRICT

    kind: TransformKind
    center: list[float] | None = None
    offset: list[float] | None = None
    distance: list[float] | None = None
    quarter_turns: int = Field(default=1, ge=1, le=3)

    @model_validator(mode="after")
    def check_parameters(self):
        if self.kind is TransformKind.composite:
            raise ValueError("composite transforms cannot be configured directly")
        if self.kind is TransformKind.translation and (self.offset is None) == (
            self.distance is None
        ):
            raise ValueError("translations need exactly one of offset or distance")
        return self

    def build(self, grid: Grid, refine: int = 0) -> SpatialTransform:
        offset = None
        if self.offset is not None:
            offset = [o * 2**refine for o in self.offset]
        elif self.distance is not None:
            offset = [d / dx for d, dx in zip(self.distance, grid.dx, strict=False)]
        return make_transform(
            self.kind,
            grid,
            center=self.center,
            offset=offset,
            quarter_turns=self.quarter_turns,
        )


class GaussianInitial(BaseModel):
    """Normalized Gaussian packet ``exp(-(x-x0)²/4σ²) exp(i k0 x)`` per axis."""

    model_config = STRICT

    preset: Literal["gaussian"]
    center: float | list[float] = 0.0
    width: float = Field(default=1.0, gt=0)
    momentum: float | list[float] = 0.0
    amplitude: float = 1.0

    def build(self, grid: Grid, h: Hamiltonian, seed: int, base_dir=None):
        center = _per_axis(self.center, grid.dim, "center")
        momentum = _per_axis(self.momentum, grid.dim, "momentum")
        values = np.ones(grid.shape, dtype=complex)
        for x, x0, k0 in zip(grid.coordinates(), center, momentum, strict=True):
            values = values * np.exp(-((x - x0) ** 2) / (4.0 * self.width**2) + 1j * k0 * x)
        field = ComplexField(grid, values)
        return field.with_values(self.amplitude * values / norm(field)), None


class EigenstateInitial(BaseModel):
    """Eigenstate of H± nearest to ``shift + i shift_imag`` (1D)."""

    model_config = STRICT

    preset: Literal["eigenstate"]
    shift: float = 0.0
    shift_imag: float = 0.0
    sign: Literal[1, -1] = 1
    tol: float = Field(default=1e-10, gt=0)
    max_iter: int = Field(default=500, ge=1)

    def build(self, grid: Grid, h: Hamiltonian, seed: int, base_dir=None):
        state = stationary_state(
            h,
            self.sign,
            complex(self.shift, self.shift_imag),
            tol=self.tol,
            max_iter=self.max_iter,
            seed=seed,
        )
        return state.field, state


class PlaneWaveInitial(BaseModel):
    model_config = STRICT

    preset: Literal["plane_wave"]
    wavenumber: float | list[float]
    amplitude: float = 1.0

    def build(self, grid: Grid, h: Hamiltonian, seed: int, base_dir=None):
        k = _per_axis(self.wavenumber, grid.dim, "wavenumber")
        phase = sum(kk * x for kk, x in zip(k, grid.coordinates(), strict=True))
        return ComplexField(grid, self.amplitude * np.exp(1j * phase)), None


class PlaneWaveTerm(BaseModel):
    model_config = STRICT

    wavenumber: float | list[float]
    coefficient: tuple[float, float] = (1.0, 0.0)


class SuperpositionInitial(BaseModel):
    """``sum_j c_j exp(i k_j x)`` with ``c_j = [re, im]``."""

    model_config = STRICT

    preset: Literal["superposition"]
    terms: list[PlaneWaveTerm] = Field(min_length=1)

    def build(self, grid: Grid, h: Hamiltonian, seed: int, base_dir=None):
        values = np.zeros(grid.shape, dtype=complex)
        for term in self.terms:
            k = _per_axis(term.wavenumber, grid.dim, "wavenumber")
            phase = sum(kk * x for kk, x in zip(k, grid.coordinates(), strict=True))
            values += complex(*term.coefficient) * np.exp(1j * phase)
        return ComplexField(grid, values), None


class FileInitial(BaseModel):
    model_config = STRICT

    preset: Literal["file"]
    path: Path

    def build(self, grid: Grid, h: Hamiltonian, seed: int, base_dir=None):
        field = read_field(_resolve(self.path, base_dir))
        if field.grid != grid:
            raise ConfigError(f"{self.path}: sampled on another grid")
        return field, None


InitialCondition = Annotated[
    GaussianInitial
    | EigenstateInitial
    | PlaneWaveInitial
    | SuperpositionInitial
    | FileInitial,
    Field(discriminator="preset"),
]


@dataclasses.dataclass(frozen=True)
class Setup:
    """Everything a run needs, built from a scenario."""

    grid: Grid
    hamiltonian: Hamiltonian
    transform: SpatialTransform | None
    psi_plus: ComplexField
    psi_minus: ComplexField
    stationary: StationaryState | None
    dt: float
    steps: int
    needs_dual: bool


class Scenario(BaseModel):
    """A complete run description."""

    model_config = STRICT

    name: str
    description: str = ""
    grid: GridSpec
    hamiltonian: HamiltonianConfig = HamiltonianConfig()
    transform: TransformSpec | None = None
    initial: InitialCondition
    initial_minus: InitialCondition | None = None
    method: PropagationMethod = PropagationMethod.auto
    kinetic: KineticSymbol = KineticSymbol.continuum
    dt: float = Field(gt=0)
    steps: int = Field(ge=0)
    kinds: list[PairingKind] = []
    negative_controls: list[PairingKind] = []
    stride: int = Field(default=10, ge=1)
    drift_threshold: float = Field(default=1e-8, gt=0)
    lagrangian: bool = False
    phases: list[tuple[float, float]] = [(0.5, 1.0)]
    seed: int = 0

    _base_dir: Path | None = PrivateAttr(default=None)

    @model_validator(mode="after")
    def check_kinds(self):
        for kind in self.analyzed_kinds:
            if pairing_class(kind).REQUIRES_TRANSFORM and self.transform is None:
                raise ValueError(f"kind {kind.value} needs a transform")
        return self

    @property
    def analyzed_kinds(self) -> list[PairingKind]:
        return list(dict.fromkeys(self.kinds + self.negative_controls))

    @property
    def needs_dual(self) -> bool:
        return self.lagrangian or any(
            pairing_class(kind).REQUIRES_DUAL for kind in self.analyzed_kinds
        )

    @property
    def base_dir(self) -> Path | None:
        return self._base_dir

    def with_overrides(self, **overrides) -> "Scenario":
        """Return a validated copy with the non-None overrides applied."""
        updates = {k: v for k, v in overrides.items() if v is not None}
        if not updates:
            return self
        copy = Scenario.model_validate({**self.model_dump(mode="json"), **updates})
        copy._base_dir = self._base_dir
        return copy

    def phase_samples(self) -> list[PhaseDilation]:
        return [PhaseDilation(phi_r, phi_i) for phi_r, phi_i in self.phases]

    def build(self, refine: int = 0) -> Setup:
        """Sample the grid, Hamiltonian, transform and initial fields.

        ``refine`` halves dx and dt that many times over the same box and
        time span.
        """
        grid = self.grid.build(refine)
        h = self.hamiltonian.build(grid, self.base_dir)
        transform = (
            self.transform.build(grid, refine) if self.transform is not None else None
        )
        psi_plus, stationary = self.initial.build(grid, h, self.seed, self.base_dir)
        if self.initial_minus is None:
            psi_minus = psi_plus
        else:
            psi_minus, _ = self.initial_minus.build(grid, h, self.seed, self.base_dir)
        scale = 2**refine
        return Setup(
            grid,
            h,
            transform,
            psi_plus,
            psi_minus,
            stationary,
            self.dt / scale,
            self.steps * scale,
            self.needs_dual,
        )


def bundled_scenarios() -> list[str]:
    return list_json_resources(SCENARIO_DIRECTORY)


def load_scenario(source: str | Path) -> Scenario:
    """Load a scenario from a JSON file or by bundled name.

    :raises ConfigError: if the file cannot be read or parsed, or the name
        is unknown.
    :raises pydantic.ValidationError: if the document does not match the
        schema.
    """
    path = Path(source)
    if path.is_file():
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"{path}: {e}") from e
        scenario = Scenario.model_validate(data)
        scenario._base_dir = path.parent
        return scenario
    name = str(source)
    if name not in bundled_scenarios():
        raise ConfigError(
            f"{name!r} is neither a file nor a bundled scenario "
            f"({', '.join(bundled_scenarios())})"
        )
    return Scenario.model_validate(load_json_resource(SCENARIO_DIRECTORY, f"{name}.json"))

