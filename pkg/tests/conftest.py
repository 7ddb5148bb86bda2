import numpy as np
import pytest

from symcurrents.grid import Grid
from symcurrents.symmetry import make_transform
from tests.utils import make_hamiltonian


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(scope="session")
def box():
    """Dirichlet box [-10, 10] with dx = 0.05."""
    return Grid.from_bounds([-10.0], [10.0], [399], ["dirichlet"])


@pytest.fixture(scope="session")
def small_box():
    return Grid.from_bounds([-5.0], [5.0], [49], ["dirichlet"])


@pytest.fixture(scope="session")
def ring():
    """Periodic axis [-8, 8) with 128 points."""
    return Grid.from_bounds([-8.0], [8.0], [128], ["periodic"])


@pytest.fixture(scope="session")
def small_ring():
    return Grid.from_bounds([-4.0], [4.0], [32], ["periodic"])


@pytest.fixture(scope="session")
def square():
    """Periodic 2D grid whose quarter-turn center is the origin."""
    return Grid.from_bounds(
        [-5.8125, -5.8125], [6.1875, 6.1875], [32, 32], ["periodic", "periodic"]
    )


@pytest.fixture(scope="session")
def oscillator(small_box):
    return make_hamiltonian(small_box, V=("harmonic", {"omega": 1.0}))


@pytest.fixture(scope="session")
def pt_oscillator(small_box):
    """V = x²/2 with odd gain/loss W = 0.3 x."""
    return make_hamiltonian(
        small_box, V=("harmonic", {"omega": 1.0}), W=("linear", {"slope": 0.3})
    )


@pytest.fixture(scope="session")
def parity(small_box):
    return make_transform("parity", small_box)
