import dataclasses
import math
from enum import Enum

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import model_validator

from symcurrents.utils import GridMismatch


class BoundaryCondition(str, Enum):
    dirichlet = "dirichlet"
    periodic = "periodic"


class Grid(BaseModel):
    """A uniform rectilinear grid in one or two dimensions.

    The coordinate of index ``i`` along axis ``k`` is exactly
    ``origin[k] + i * dx[k]``. Dirichlet axes hold the field zero one
    step outside the stored range, so the walls sit at
    ``origin - dx`` and ``origin + n * dx``.

    >>> grid = Grid.from_bounds([-1.0], [1.0], [7], ["dirichlet"])
    >>> grid.dx
    (0.25,)
    >>> grid.axis(0).tolist()
    [-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75]
    """

    model_config = ConfigDict(frozen=True)

    n: tuple[int, ...]
    dx: tuple[float, ...]
    origin: tuple[float, ...]
    bc: tuple[BoundaryCondition, ...]

    @model_validator(mode="after")
    def check_axes(self):
        if len(self.n) not in (1, 2):
            raise ValueError("only one- and two-dimensional grids are supported")
        if not len(self.n) == len(self.dx) == len(self.origin) == len(self.bc):
            raise ValueError("n, dx, origin and bc must have one entry per axis")
        if any(count < 4 for count in self.n):
            raise ValueError("every axis needs at least 4 points")
        if any(not (math.isfinite(step) and step > 0) for step in self.dx):
            raise ValueError("grid spacing must be finite and positive")
        if any(not math.isfinite(start) for start in self.origin):
            raise ValueError("grid origin must be finite")
        return self

    @classmethod
    def from_bounds(
        cls,
        lower: list[float],
        upper: list[float],
        n: list[int],
        bc: list[BoundaryCondition | str],
    ) -> "Grid":
        """Build a grid covering the box ``[lower, upper]``.

        Dirichlet axes put their walls on the box faces and store ``n``
        interior points. Periodic axes store ``n`` points, the first one
        on ``lower``.
        """
        dx, origin = [], []
        for low, high, count, cond in zip(lower, upper, n, bc, strict=True):
            if not high > low:
                raise ValueError(f"empty axis [{low}, {high}]")
            if BoundaryCondition(cond) is BoundaryCondition.dirichlet:
                step = (high - low) / (count + 1)
                dx.append(step)
                origin.append(low + step)
            else:
                dx.append((high - low) / count)
                origin.append(low)
        return cls(
            n=tuple(n),
            dx=tuple(dx),
            origin=tuple(origin),
            bc=tuple(BoundaryCondition(b) for b in bc),
        )

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.n)

    @property
    def size(self) -> int:
        return math.prod(self.n)

    @property
    def cell_volume(self) -> float:
        return math.prod(self.dx)

    @property
    def all_periodic(self) -> bool:
        return all(b is BoundaryCondition.periodic for b in self.bc)

    def is_periodic(self, axis: int) -> bool:
        return self.bc[axis] is BoundaryCondition.periodic

    def axis(self, k: int) -> np.ndarray:
        return self.origin[k] + np.arange(self.n[k]) * self.dx[k]

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Return one coordinate array per axis, each with the grid shape."""
        return tuple(
            np.meshgrid(*(self.axis(k) for k in range(self.dim)), indexing="ij")
        )

    def center(self, k: int) -> float:
        return self.origin[k] + 0.5 * (self.n[k] - 1) * self.dx[k]

    def extent(self, k: int) -> float:
        """Physical length of axis ``k``: wall to wall, or one period."""
        if self.is_periodic(k):
            return self.n[k] * self.dx[k]
        return (self.n[k] + 1) * self.dx[k]

    def refined(self) -> "Grid":
        """Return the grid covering the same box with half the spacing."""
        n, dx, origin = [], [], []
        for k in range(self.dim):
            half = 0.5 * self.dx[k]
            dx.append(half)
            if self.is_periodic(k):
                n.append(2 * self.n[k])
                origin.append(self.origin[k])
            else:
                n.append(2 * self.n[k] + 1)
                origin.append(self.origin[k] - half)
        return Grid(n=tuple(n), dx=tuple(dx), origin=tuple(origin), bc=self.bc)


@dataclasses.dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex samples of a field on a grid, optionally tagged with a time."""

    grid: Grid
    values: np.ndarray
    time_tag: float | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.size != self.grid.size:
            raise ValueError(
                f"field has {values.size} values, grid has {self.grid.size} points"
            )
        values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    @property
    def imag(self) -> np.ndarray:
        return self.values.imag

    def conj(self) -> "ComplexField":
        return self.with_values(np.conj(self.values))

    def with_values(self, values: np.ndarray) -> "ComplexField":
        return ComplexField(self.grid, values, self.time_tag)


@dataclasses.dataclass(frozen=True, eq=False)
class RealField:
    """Real samples on a grid, such as a potential or a Lagrangian density."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if np.iscomplexobj(values):
            if np.any(values.imag != 0):
                raise ValueError("real field received complex values")
            values = values.real
        values = np.array(values, dtype=float)
        if values.size != self.grid.size:
            raise ValueError(
                f"field has {values.size} values, grid has {self.grid.size} points"
            )
        values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: Grid) -> "RealField":
        return cls(grid, np.zeros(grid.shape))


@dataclasses.dataclass(frozen=True, eq=False)
class VectorField:
    """One component array per spatial axis."""

    grid: Grid
    components: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.components) != self.grid.dim:
            raise ValueError(
                f"{len(self.components)} components for a {self.grid.dim}D grid"
            )
        components = []
        for component in self.components:
            component = np.array(component, dtype=complex)
            if component.size != self.grid.size:
                raise ValueError("vector component does not match the grid")
            component = component.reshape(self.grid.shape)
            component.flags.writeable = False
            components.append(component)
        object.__setattr__(self, "components", tuple(components))


def check_same_grid(*fields) -> Grid:
    """Return the common grid of the given fields or raise GridMismatch."""
    grid = fields[0].grid
    for field in fields[1:]:
        if field.grid != grid:
            raise GridMismatch("fields live on different grids")
    return grid


# The *_values helpers act on the trailing grid.dim axes, so stacks of
# snapshots with leading time axes go through them unchanged.


def _spatial_axis(values: np.ndarray, grid: Grid, axis: int) -> int:
    return values.ndim - grid.dim + axis


def neighbor(values: np.ndarray, grid: Grid, axis: int, step: int) -> np.ndarray:
    """Return ``s`` with ``s[i] = values[i + step]`` along a spatial axis.

    Periodic axes wrap, Dirichlet axes read zeros past the ends.
    """
    ax = _spatial_axis(values, grid, axis)
    if grid.is_periodic(axis):
        return np.roll(values, -step, axis=ax)
    out = np.zeros_like(values)
    count = values.shape[ax]
    src = [slice(None)] * values.ndim
    dst = [slice(None)] * values.ndim
    if step > 0:
        src[ax] = slice(step, None)
        dst[ax] = slice(0, count - step)
    else:
        src[ax] = slice(0, count + step)
        dst[ax] = slice(-step, None)
    out[tuple(dst)] = values[tuple(src)]
    return out


def central_difference(values: np.ndarray, grid: Grid, axis: int) -> np.ndarray:
    return (neighbor(values, grid, axis, 1) - neighbor(values, grid, axis, -1)) / (
        2.0 * grid.dx[axis]
    )


def gradient_values(values: np.ndarray, grid: Grid) -> tuple[np.ndarray, ...]:
    return tuple(central_difference(values, grid, k) for k in range(grid.dim))


def divergence_values(components, grid: Grid) -> np.ndarray:
    if len(components) != grid.dim:
        raise ValueError(f"{len(components)} components for a {grid.dim}D grid")
    return sum(
        central_difference(component, grid, k)
        for k, component in enumerate(components)
    )


def laplacian_values(values: np.ndarray, grid: Grid) -> np.ndarray:
    total = np.zeros_like(values)
    for k in range(grid.dim):
        total = total + (
            neighbor(values, grid, k, 1) - 2.0 * values + neighbor(values, grid, k, -1)
        ) / (grid.dx[k] ** 2)
    return total


def integrate_values(values: np.ndarray, grid: Grid):
    """Quadrature over the trailing spatial axes.

    On Dirichlet axes the plain sum is the trapezoid rule over the closed
    box, the half-weighted end points being the zero wall values.
    """
    spatial = tuple(range(values.ndim - grid.dim, values.ndim))
    return np.sum(values, axis=spatial) * grid.cell_volume


def l2_norm_values(values: np.ndarray, grid: Grid):
    return np.sqrt(integrate_values(np.abs(values) ** 2, grid))


def boundary_flux_values(components, grid: Grid):
    """Outward flux of a vector field through the Dirichlet walls.

    The normal component on each wall is extrapolated quadratically from
    the three nearest stored points. Periodic axes carry no flux.
    """
    total = 0.0
    for axis in range(grid.dim):
        if grid.is_periodic(axis):
            continue
        component = components[axis]
        ax = _spatial_axis(component, grid, axis)

        def take(i, component=component, ax=ax):
            return np.take(component, i, axis=ax)

        upper = 3.0 * take(-1) - 3.0 * take(-2) + take(-3)
        lower = 3.0 * take(0) - 3.0 * take(1) + take(2)
        face = upper - lower
        if grid.dim > 1:
            face = np.sum(face, axis=-1)
        total = total + face * (grid.cell_volume / grid.dx[axis])
    return total


def gradient(f: ComplexField) -> VectorField:
    """Central second-order gradient of a field."""
    return VectorField(f.grid, gradient_values(f.values, f.grid))


def divergence(v: VectorField) -> ComplexField:
    return ComplexField(v.grid, divergence_values(v.components, v.grid))


def laplacian(f: ComplexField) -> ComplexField:
    """Three-point (1D) or five-point (2D) Laplacian."""
    return ComplexField(f.grid, laplacian_values(f.values, f.grid), f.time_tag)


def integrate(f: ComplexField | RealField) -> complex:
    return complex(integrate_values(f.values, f.grid))


def inner(f: ComplexField, g: ComplexField) -> complex:
    """Return the grid inner product ``integrate(conj(f) * g)``."""
    grid = check_same_grid(f, g)
    return complex(integrate_values(np.conj(f.values) * g.values, grid))


def norm(f: ComplexField) -> float:
    return float(l2_norm_values(f.values, f.grid))


def boundary_flux(v: VectorField) -> complex:
    return complex(boundary_flux_values(v.components, v.grid))
