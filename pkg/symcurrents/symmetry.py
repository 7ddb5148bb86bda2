import dataclasses
import math
from enum import Enum

import numpy as np

from symcurrents.grid import ComplexField
from symcurrents.grid import Grid
from symcurrents.utils import GridMismatch
from symcurrents.utils import IncompatibleGrid
from symcurrents.utils import NonIntegerOffset

LATTICE_TOLERANCE = 1e-9


class TransformKind(str, Enum):
    identity = "identity"
    parity = "parity"
    translation = "translation"
    rotation90 = "rotation90"
    composite = "composite"


class SymmetryTag(str, Enum):
    """Rows of the generalized conservation table.

    ``a`` needs no spatial symmetry, ``b`` is F-symmetry (FHF⁻¹ = H) and
    ``c`` is FT-symmetry (FHF⁻¹ = H*).
    """

    no_symmetry = "a"
    f_symmetric = "b"
    ft_symmetric = "c"


@dataclasses.dataclass(frozen=True, eq=False)
class SpatialTransform:
    """A grid-exact map F realized as a permutation of flat grid indices.

    Applying the transform to a field gives ``out[i] = f[permutation[i]]``,
    that is ``(Ff)(x) = f(Fx)``.
    """

    kind: TransformKind
    grid: Grid
    permutation: np.ndarray
    center: tuple[float, ...] | None = None
    offset: tuple[int, ...] | None = None
    quarter_turns: int | None = None

    def __post_init__(self):
        permutation = np.array(self.permutation, dtype=np.intp).reshape(-1)
        if permutation.size != self.grid.size or not np.array_equal(
            np.sort(permutation), np.arange(self.grid.size)
        ):
            raise IncompatibleGrid(f"{self.kind.value} map is not a bijection")
        permutation.flags.writeable = False
        object.__setattr__(self, "permutation", permutation)

    def __eq__(self, other):
        if not isinstance(other, SpatialTransform):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(
            self.permutation, other.permutation
        )

    def __hash__(self):
        return hash((self.grid, self.permutation.tobytes()))

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.permutation, np.arange(self.grid.size)))

    def apply_values(self, values: np.ndarray) -> np.ndarray:
        """Apply the map to the trailing spatial axes of a stack of samples."""
        lead = values.shape[: values.ndim - self.grid.dim]
        flat = values.reshape(lead + (self.grid.size,))
        return flat[..., self.permutation].reshape(values.shape)

    def order(self) -> int:
        """Smallest k > 0 with F^k = identity."""
        current = self.permutation
        k = 1
        while not np.array_equal(current, np.arange(self.grid.size)):
            current = current[self.permutation]
            k += 1
        return k


@dataclasses.dataclass(frozen=True)
class SymmetryCase:
    tag: SymmetryTag
    transform: SpatialTransform


def _index_map(grid: Grid, mapped: list[np.ndarray]) -> np.ndarray:
    return np.ravel_multi_index(tuple(mapped), grid.shape).reshape(-1)


def _parity_indices(grid: Grid, center: tuple[float, ...]) -> list[np.ndarray]:
    indices = np.indices(grid.shape)
    mapped = []
    for k in range(grid.dim):
        twice = 2.0 * (center[k] - grid.origin[k]) / grid.dx[k]
        nearest = round(twice)
        if abs(twice - nearest) > LATTICE_TOLERANCE:
            raise IncompatibleGrid(
                f"parity center {center[k]} is not a lattice-symmetric point of axis {k}"
            )
        if grid.is_periodic(k):
            mapped.append((nearest - indices[k]) % grid.n[k])
        else:
            if nearest != grid.n[k] - 1:
                raise IncompatibleGrid(
                    f"parity center {center[k]} differs from the grid center "
                    f"{grid.center(k)} on Dirichlet axis {k}"
                )
            mapped.append(grid.n[k] - 1 - indices[k])
    return mapped


def _translation_indices(grid: Grid, offset: tuple[int, ...]) -> list[np.ndarray]:
    indices = np.indices(grid.shape)
    mapped = []
    for k in range(grid.dim):
        if offset[k] != 0 and not grid.is_periodic(k):
            raise IncompatibleGrid(f"translation along non-periodic axis {k}")
        mapped.append((indices[k] + offset[k]) % grid.n[k])
    return mapped


def _whole_cells(value: float, what: str) -> int:
    nearest = round(value)
    if abs(value - nearest) > LATTICE_TOLERANCE:
        raise IncompatibleGrid(f"{what} does not land on the lattice")
    return int(nearest)


def _rotation_indices(
    grid: Grid, quarter_turns: int, center: tuple[float, ...]
) -> list[np.ndarray]:
    if grid.dim != 2:
        raise IncompatibleGrid("quarter-turn rotations need a 2D grid")
    if (
        grid.n[0] != grid.n[1]
        or not math.isclose(grid.dx[0], grid.dx[1], rel_tol=1e-12)
        or not math.isclose(grid.origin[0], grid.origin[1], abs_tol=1e-12)
        or grid.bc[0] != grid.bc[1]
    ):
        raise IncompatibleGrid("quarter-turn rotations need a square grid")
    n, dx, origin = grid.n[0], grid.dx[0], grid.origin[0]
    # (x, y) -> (c0 + c1 - y, c1 - c0 + x) in index space
    what = f"rotation center {center}"
    total = _whole_cells((center[0] + center[1] - 2.0 * origin) / dx, what)
    shift = _whole_cells((center[1] - center[0]) / dx, what)
    i, j = np.indices(grid.shape)
    for _ in range(quarter_turns % 4):
        i, j = total - j, shift + i
        if grid.is_periodic(0):
            i, j = i % n, j % n
        elif i.min() < 0 or j.min() < 0 or i.max() >= n or j.max() >= n:
            raise IncompatibleGrid(f"rotation about {center} leaves the Dirichlet box")
    return [i, j]


def _integral_offset(offset) -> tuple[int, ...]:
    result = []
    for value in offset:
        nearest = round(float(value))
        if abs(float(value) - nearest) > LATTICE_TOLERANCE:
            raise NonIntegerOffset(f"translation offset {value} is not a whole cell count")
        result.append(int(nearest))
    return tuple(result)


def make_transform(
    kind: TransformKind | str,
    grid: Grid,
    center: list[float] | None = None,
    offset: list[float] | None = None,
    quarter_turns: int = 1,
) -> SpatialTransform:
    """Build a grid-exact transform and validate its permutation.

    :param kind: identity, parity, translation or rotation90.
    :param center: parity or rotation center per axis, defaults to the
        origin of coordinates. It must be a lattice-symmetric point.
    :param offset: translation in whole cells per axis.
    :param quarter_turns: number of counter-clockwise quarter turns (2D).
    :raises IncompatibleGrid: if the map does not land on grid points.
    :raises NonIntegerOffset: if a translation offset is fractional.
    """
    kind = TransformKind(kind)
    match kind:
        case TransformKind.identity:
            return SpatialTransform(kind, grid, np.arange(grid.size))
        case TransformKind.parity:
            center = tuple(float(c) for c in (center or [0.0] * grid.dim))
            if len(center) != grid.dim:
                raise IncompatibleGrid("parity center needs one entry per axis")
            permutation = _index_map(grid, _parity_indices(grid, center))
            return SpatialTransform(kind, grid, permutation, center=center)
        case TransformKind.translation:
            if offset is None or len(offset) != grid.dim:
                raise IncompatibleGrid("translation offset needs one entry per axis")
            cells = _integral_offset(offset)
            permutation = _index_map(grid, _translation_indices(grid, cells))
            return SpatialTransform(kind, grid, permutation, offset=cells)
        case TransformKind.rotation90:
            if quarter_turns not in (1, 2, 3):
                raise IncompatibleGrid("quarter_turns must be 1, 2 or 3")
            center = tuple(float(c) for c in (center or [0.0] * grid.dim))
            if len(center) != 2:
                raise IncompatibleGrid("rotation center needs two entries")
            permutation = _index_map(grid, _rotation_indices(grid, quarter_turns, center))
            return SpatialTransform(
                kind, grid, permutation, center=center, quarter_turns=quarter_turns
            )
        case _:
            raise IncompatibleGrid(f"cannot build a {kind.value} transform directly")


def apply_transform(F: SpatialTransform, f: ComplexField) -> ComplexField:
    """Return the field ``x -> f(Fx)``."""
    if f.grid != F.grid:
        raise GridMismatch("field and transform live on different grids")
    return f.with_values(F.apply_values(f.values))


def invert(F: SpatialTransform) -> SpatialTransform:
    inverse = np.empty_like(F.permutation)
    inverse[F.permutation] = np.arange(F.grid.size)
    match F.kind:
        case TransformKind.translation:
            offset = tuple(
                (-o) % n for o, n in zip(F.offset, F.grid.n, strict=True)
            )
            return SpatialTransform(F.kind, F.grid, inverse, offset=offset)
        case TransformKind.rotation90:
            return SpatialTransform(
                F.kind, F.grid, inverse, quarter_turns=4 - F.quarter_turns
            )
        case _:
            return dataclasses.replace(F, permutation=inverse)


def compose(F: SpatialTransform, G: SpatialTransform) -> SpatialTransform:
    """Return the transform ``x -> F(G(x))``.

    Applying the result equals applying F first and G second to the field,
    ``apply(compose(F, G), f) == apply(G, apply(F, f))``.
    """
    if F.grid != G.grid:
        raise GridMismatch("cannot compose transforms built on different grids")
    grid = F.grid
    permutation = F.permutation[G.permutation]
    if np.array_equal(permutation, np.arange(grid.size)):
        return SpatialTransform(TransformKind.identity, grid, permutation)
    if F.kind is TransformKind.identity:
        return G
    if G.kind is TransformKind.identity:
        return F
    if F.kind is G.kind is TransformKind.translation:
        offset = tuple(
            (a + b) % n for a, b, n in zip(F.offset, G.offset, grid.n, strict=True)
        )
        return SpatialTransform(F.kind, grid, permutation, offset=offset)
    if F.kind is G.kind is TransformKind.rotation90:
        turns = (F.quarter_turns + G.quarter_turns) % 4
        return SpatialTransform(F.kind, grid, permutation, quarter_turns=turns)
    return SpatialTransform(TransformKind.composite, grid, permutation)
