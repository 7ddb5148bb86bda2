import dataclasses

import numpy as np

from symcurrents.grid import ComplexField
from symcurrents.grid import Grid
from symcurrents.grid import RealField
from symcurrents.grid import check_same_grid
from symcurrents.grid import inner
from symcurrents.grid import laplacian_values
from symcurrents.symmetry import SpatialTransform
from symcurrents.symmetry import SymmetryCase
from symcurrents.symmetry import SymmetryTag
from symcurrents.utils import GridMismatch
from symcurrents.utils import NotOneDimensional


def check_sign(sign: int) -> int:
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return sign


@dataclasses.dataclass(frozen=True, eq=False)
class Hamiltonian:
    """The pair H± = -½∇² + V ± iW with real V and W on a grid.

    W > 0 models gain and W < 0 loss for the ``+`` member.
    """

    grid: Grid
    V: RealField
    W: RealField

    def __post_init__(self):
        if self.V.grid != self.grid or self.W.grid != self.grid:
            raise GridMismatch("V and W must live on the Hamiltonian grid")

    @classmethod
    def from_arrays(
        cls, grid: Grid, V: np.ndarray | None = None, W: np.ndarray | None = None
    ) -> "Hamiltonian":
        return cls(
            grid,
            RealField(grid, np.zeros(grid.shape) if V is None else V),
            RealField(grid, np.zeros(grid.shape) if W is None else W),
        )

    @property
    def is_hermitian(self) -> bool:
        return not np.any(self.W.values)

    def hermitian_part(self) -> "Hamiltonian":
        return Hamiltonian(self.grid, self.V, RealField.zeros(self.grid))

    def potential(self, sign: int) -> np.ndarray:
        """Complex potential ``V + sign * iW``."""
        return self.V.values + check_sign(sign) * 1j * self.W.values

    def apply_values(self, values: np.ndarray, sign: int) -> np.ndarray:
        return -0.5 * laplacian_values(values, self.grid) + self.potential(sign) * values

    def tridiagonal(self, sign: int) -> tuple[np.ndarray, np.ndarray, complex]:
        """Return the diagonal, off-diagonal and corner coefficients of 1D H±.

        The corner couples the first and last points on periodic grids and
        is zero on Dirichlet grids.
        """
        if self.grid.dim != 1:
            raise NotOneDimensional("tridiagonal form needs a 1D grid")
        inv = 1.0 / self.grid.dx[0] ** 2
        diagonal = inv + self.potential(sign).astype(complex)
        off = -0.5 * inv
        corner = off if self.grid.is_periodic(0) else 0.0
        return diagonal, complex(off), complex(corner)


def apply_hamiltonian(h: Hamiltonian, f: ComplexField, sign: int) -> ComplexField:
    """Return ``-½ laplacian(f) + V f + sign i W f``."""
    if f.grid != h.grid:
        raise GridMismatch("field and Hamiltonian live on different grids")
    return f.with_values(h.apply_values(f.values, sign))


def default_tolerance(h: Hamiltonian) -> float:
    scale = max(1.0, float(np.max(np.abs(h.V.values))), float(np.max(np.abs(h.W.values))))
    return 1e-12 * scale


def classify_symmetry(
    h: Hamiltonian, F: SpatialTransform, tol: float | None = None
) -> frozenset[SymmetryCase]:
    """Return the rows of the conservation table that H supports under F.

    ``b`` holds when V and W are both F-symmetric, ``c`` when V is
    F-symmetric and W is F-antisymmetric. Both hold when W vanishes. Row
    ``a`` is returned only when neither does.
    """
    if F.grid != h.grid:
        raise GridMismatch("transform and Hamiltonian live on different grids")
    if tol is None:
        tol = default_tolerance(h)
    V, W = h.V.values, h.W.values
    FV, FW = F.apply_values(V), F.apply_values(W)
    v_symmetric = np.max(np.abs(FV - V)) <= tol
    cases = set()
    if v_symmetric and np.max(np.abs(FW - W)) <= tol:
        cases.add(SymmetryCase(SymmetryTag.f_symmetric, F))
    if v_symmetric and np.max(np.abs(FW + W)) <= tol:
        cases.add(SymmetryCase(SymmetryTag.ft_symmetric, F))
    if not cases:
        cases.add(SymmetryCase(SymmetryTag.no_symmetry, F))
    return frozenset(cases)


def symmetry_tags(cases) -> list[SymmetryTag]:
    return sorted({case.tag for case in cases}, key=lambda tag: tag.value)


def mixed_expectation(
    h: Hamiltonian,
    psi_minus: ComplexField,
    psi_plus: ComplexField,
    hermitian_part: bool = False,
) -> complex:
    """Return ``inner(psi_minus, H psi_plus)``.

    ``H`` is H₊ by default and the Hermitian part H∘ when
    ``hermitian_part`` is set.
    """
    check_same_grid(h, psi_minus, psi_plus)
    operator = h.hermitian_part() if hermitian_part else h
    return inner(psi_minus, apply_hamiltonian(operator, psi_plus, 1))


def to_banded(h: Hamiltonian, sign: int) -> tuple[np.ndarray, complex, complex]:
    """Tridiagonal coefficients of H± on a 1D grid, see :meth:`Hamiltonian.tridiagonal`."""
    return h.tridiagonal(sign)
