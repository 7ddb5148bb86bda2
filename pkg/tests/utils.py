import json
from pathlib import Path

import numpy as np

from symcurrents.grid import ComplexField
from symcurrents.grid import Grid
from symcurrents.grid import norm
from symcurrents.hamiltonian import Hamiltonian
from symcurrents.potentials import evaluate_preset


def dense_hamiltonian(h: Hamiltonian, sign: int) -> np.ndarray:
    """Assemble H± column by column from its action on unit vectors."""
    size = h.grid.size
    matrix = np.zeros((size, size), dtype=complex)
    for j in range(size):
        unit = np.zeros(size, dtype=complex)
        unit[j] = 1.0
        matrix[:, j] = h.apply_values(unit.reshape(h.grid.shape), sign).reshape(-1)
    return matrix


def dense_eigenvalues(h: Hamiltonian, sign: int) -> np.ndarray:
    """Eigenvalues sorted by real part."""
    values = np.linalg.eigvals(dense_hamiltonian(h, sign))
    return values[np.argsort(values.real)]


def gaussian(grid: Grid, center=0.0, width=1.0, momentum=0.0) -> ComplexField:
    """Build a normalized Gaussian packet, product form in 2D."""
    centers = np.broadcast_to(np.asarray(center, dtype=float), (grid.dim,))
    momenta = np.broadcast_to(np.asarray(momentum, dtype=float), (grid.dim,))
    values = np.ones(grid.shape, dtype=complex)
    for x, x0, k0 in zip(grid.coordinates(), centers, momenta, strict=True):
        values = values * np.exp(-((x - x0) ** 2) / (4.0 * width**2) + 1j * k0 * x)
    field = ComplexField(grid, values)
    return field.with_values(values / norm(field))


def random_field(grid: Grid, rng: np.random.Generator, scale: float = 1.0) -> ComplexField:
    values = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return ComplexField(grid, scale * values)


def ratios(values) -> list[float]:
    """Successive ratios ``values[k] / values[k + 1]`` of a refinement study."""
    return [a / b for a, b in zip(values[:-1], values[1:], strict=True)]


def make_hamiltonian(grid: Grid, V=("zero", {}), W=("zero", {})) -> Hamiltonian:
    """Hamiltonian from ``(preset, params)`` pairs."""
    return Hamiltonian(
        grid,
        evaluate_preset(V[0], grid, **V[1]),
        evaluate_preset(W[0], grid, **W[1]),
    )


def scenario_document(**overrides) -> dict:
    """A small odd gain/loss scenario in a Dirichlet box, with overrides."""
    document = {
        "name": "small",
        "grid": {"lower": [-5.0], "upper": [5.0], "n": [49], "bc": ["dirichlet"]},
        "hamiltonian": {
            "V": {"preset": "harmonic", "omega": 1.0},
            "W": {"preset": "linear", "slope": 0.3},
        },
        "transform": {"kind": "parity"},
        "initial": {"preset": "gaussian", "center": 1.0},
        "dt": 0.05,
        "steps": 4,
        "kinds": ["mixed", "bilocal_f_c"],
    }
    document.update(overrides)
    return document


def write_scenario(directory: Path, filename: str = "scenario.json", **overrides) -> Path:
    path = directory / filename
    path.write_text(json.dumps(scenario_document(**overrides)))
    return path
