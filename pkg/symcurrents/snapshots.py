"""Field snapshot files.

A snapshot is a CSV document whose first line describes the grid::

    # grid: dim,n,dx,origin,bc

with per-axis values joined by ``;``, followed by one row per grid point
``index_0[,index_1],re,im``.
"""

from pathlib import Path

import numpy as np

from symcurrents.grid import BoundaryCondition
from symcurrents.grid import ComplexField
from symcurrents.grid import Grid
from symcurrents.utils import ConfigError

HEADER_PREFIX = "grid:"


def format_grid_header(grid: Grid) -> str:
    def join(values):
        return ";".join(values)

    return (
        f"{HEADER_PREFIX} {grid.dim},"
        f"{join(str(n) for n in grid.n)},"
        f"{join(repr(float(d)) for d in grid.dx)},"
        f"{join(repr(float(o)) for o in grid.origin)},"
        f"{join(b.value for b in grid.bc)}"
    )


def parse_grid_header(line: str) -> Grid:
    text = line.lstrip("#").strip()
    if not text.startswith(HEADER_PREFIX):
        raise ConfigError(f"not a snapshot header: {line!r}")
    try:
        dim, n, dx, origin, bc = text[len(HEADER_PREFIX) :].strip().split(",")
        grid = Grid(
            n=tuple(int(v) for v in n.split(";")),
            dx=tuple(float(v) for v in dx.split(";")),
            origin=tuple(float(v) for v in origin.split(";")),
            bc=tuple(BoundaryCondition(v) for v in bc.split(";")),
        )
    except ValueError as e:
        raise ConfigError(f"malformed snapshot header {line!r}: {e}") from e
    if grid.dim != int(dim):
        raise ConfigError(f"snapshot header declares dim {dim} for {grid.dim} axes")
    return grid


def write_field(f: ComplexField, path: Path | str):
    grid = f.grid
    indices = np.indices(grid.shape).reshape(grid.dim, -1).T
    flat = f.values.reshape(-1)
    rows = np.column_stack([indices, flat.real, flat.imag])
    fmt = ["%d"] * grid.dim + ["%.17g", "%.17g"]
    np.savetxt(
        path, rows, fmt=fmt, delimiter=",", header=format_grid_header(grid), comments="# "
    )


def _point_indices(raw: np.ndarray, grid: Grid, path: Path) -> tuple[np.ndarray, ...]:
    """Check that the index columns list every grid point exactly once."""
    if not np.array_equal(raw, np.round(raw)):
        raise ConfigError(f"{path}: point indices must be integers")
    indices = raw.astype(int)
    if np.any(indices < 0) or np.any(indices >= np.array(grid.n)):
        raise ConfigError(f"{path}: point index outside the grid {grid.shape}")
    flat = np.ravel_multi_index(tuple(indices.T), grid.shape)
    if np.unique(flat).size != grid.size:
        raise ConfigError(f"{path}: repeated point indices")
    return tuple(indices.T)


def read_field(path: Path | str) -> ComplexField:
    path = Path(path)
    try:
        with path.open() as fp:
            header = fp.readline()
    except OSError as e:
        raise ConfigError(f"cannot read snapshot {path}: {e}") from e
    grid = parse_grid_header(header)
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except ValueError as e:
        raise ConfigError(f"{path}: malformed snapshot rows: {e}") from e
    if data.shape != (grid.size, grid.dim + 2):
        raise ConfigError(f"{path}: expected {grid.size} rows of {grid.dim + 2} columns")
    indices = _point_indices(data[:, : grid.dim], grid, path)
    values = np.zeros(grid.shape, dtype=complex)
    values[indices] = data[:, grid.dim] + 1j * data[:, grid.dim + 1]
    return ComplexField(grid, values)
