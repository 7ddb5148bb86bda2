"""Closed-form potential and gain/loss profiles.

Every preset takes the grid coordinates and keyword parameters and returns
real samples. The same presets serve V and W: ``linear`` is the odd
(PT-type) imaginary potential when used for W, ``gaussian`` the even one,
``constant`` a uniform gain or loss.
"""

import inspect

import numpy as np

from symcurrents.grid import Grid
from symcurrents.grid import RealField
from symcurrents.utils import ConfigError


def _center(grid: Grid, center) -> list[float]:
    if center is None:
        return [0.0] * grid.dim
    if isinstance(center, int | float):
        return [float(center)] * grid.dim
    return [float(c) for c in center]


def zero(grid: Grid) -> np.ndarray:
    return np.zeros(grid.shape)


def constant(grid: Grid, value: float = 0.0) -> np.ndarray:
    return np.full(grid.shape, float(value))


def harmonic(grid: Grid, omega: float = 1.0, center=None) -> np.ndarray:
    center = _center(grid, center)
    coords = grid.coordinates()
    return 0.5 * omega**2 * sum((x - c) ** 2 for x, c in zip(coords, center, strict=True))


def box(
    grid: Grid, height: float = 0.0, lower=None, upper=None, axis: int = 0
) -> np.ndarray:
    """Flat well; ``height`` outside ``[lower, upper]`` along ``axis``."""
    x = grid.coordinates()[axis]
    inside = np.ones(grid.shape, dtype=bool)
    if lower is not None:
        inside &= x >= lower
    if upper is not None:
        inside &= x <= upper
    return np.where(inside, 0.0, float(height))


def lattice_cosine(
    grid: Grid, amplitude: float = 1.0, period: float = 1.0, axis: int = 0, shift: float = 0.0
) -> np.ndarray:
    x = grid.coordinates()[axis]
    return amplitude * np.cos(2.0 * np.pi * (x - shift) / period)


def polynomial(
    grid: Grid, coefficients: list[float] = (0.0,), axis: int = 0, center: float = 0.0
) -> np.ndarray:
    """``sum_k coefficients[k] * (x - center)**k`` along one axis."""
    x = grid.coordinates()[axis] - center
    return np.polynomial.polynomial.polyval(x, list(coefficients))


def linear(grid: Grid, slope: float = 1.0, axis: int = 0, center: float = 0.0) -> np.ndarray:
    return slope * (grid.coordinates()[axis] - center)


def gaussian(
    grid: Grid, amplitude: float = 1.0, width: float = 1.0, center=None
) -> np.ndarray:
    center = _center(grid, center)
    r2 = sum((x - c) ** 2 for x, c in zip(grid.coordinates(), center, strict=True))
    return amplitude * np.exp(-r2 / (2.0 * width**2))


def product_xy(grid: Grid, amplitude: float = 1.0) -> np.ndarray:
    """``amplitude * x * y``, odd under a quarter turn about the origin."""
    if grid.dim != 2:
        raise ConfigError("product_xy needs a 2D grid")
    x, y = grid.coordinates()
    return amplitude * x * y


def sine_product(grid: Grid, amplitude: float = 1.0, period: float = 1.0) -> np.ndarray:
    """``amplitude * sin(kx) sin(ky)`` with ``k = 2π / period``.

    Odd under a quarter turn about the origin and smooth across the seam of
    a periodic box whose extent is a multiple of ``period``.
    """
    if grid.dim != 2:
        raise ConfigError("sine_product needs a 2D grid")
    k = 2.0 * np.pi / period
    x, y = grid.coordinates()
    return amplitude * np.sin(k * x) * np.sin(k * y)


PRESETS = {
    "zero": zero,
    "constant": constant,
    "uniform": constant,
    "harmonic": harmonic,
    "box": box,
    "lattice_cosine": lattice_cosine,
    "polynomial": polynomial,
    "linear": linear,
    "gaussian": gaussian,
    "product_xy": product_xy,
    "sine_product": sine_product,
}


def evaluate_preset(name: str, grid: Grid, **params) -> RealField:
    """Sample a named preset on a grid.

    :raises ConfigError: for unknown presets or parameters, and for
        parameter values the preset cannot evaluate.
    """
    try:
        preset = PRESETS[name]
    except KeyError as e:
        raise ConfigError(
            f"unknown potential preset {name!r}, expected one of {sorted(PRESETS)}"
        ) from e
    accepted = set(inspect.signature(preset).parameters) - {"grid"}
    unknown = set(params) - accepted
    if unknown:
        raise ConfigError(f"preset {name!r} does not take {sorted(unknown)}")
    try:
        return RealField(grid, preset(grid, **params))
    except (TypeError, ValueError, IndexError, ArithmeticError) as e:
        raise ConfigError(f"preset {name!r}: {e}") from e
