"""Generalized densities, currents and their continuity equations.

Every pairing is written as ``rho = left * right`` and
``J = (left grad(right) - right grad(left)) / 2i`` where ``right`` is the
stored field Ψ(x, t) (Ψ₊ for dual pairs) and ``left`` its partner:

=================  ==========================  =====================
kind               left partner                conserved when
=================  ==========================  =====================
ordinary           Ψ*(x, t)                    H is Hermitian
mixed              Ψ₋*(x, t)                   always (dual pair)
bitemporal_t_a     Ψ(x, -t)                    always
bilocal_f_c        Ψ*(Fx, t)                   F H F⁻¹ = H*
combined_ft_b      Ψ(Fx, -t)                   F H F⁻¹ = H
=================  ==========================  =====================

Time derivatives of the density always come from stored snapshots.
"""

import dataclasses
import logging
from enum import Enum
from typing import NamedTuple

import numpy as np

from symcurrents.grid import ComplexField
from symcurrents.grid import VectorField
from symcurrents.grid import boundary_flux_values
from symcurrents.grid import divergence_values
from symcurrents.grid import gradient_values
from symcurrents.grid import integrate_values
from symcurrents.grid import l2_norm_values
from symcurrents.propagator import StationaryState
from symcurrents.propagator import Trajectory
from symcurrents.symmetry import SpatialTransform
from symcurrents.symmetry import SymmetryCase
from symcurrents.symmetry import SymmetryTag
from symcurrents.utils import GridMismatch
from symcurrents.utils import IndexOutOfRange
from symcurrents.utils import MissingTransform
from symcurrents.utils import NotOneDimensional


class PairingKind(str, Enum):
    ordinary = "ordinary"
    mixed = "mixed"
    bitemporal_t_a = "bitemporal_t_a"
    bilocal_f_c = "bilocal_f_c"
    combined_ft_b = "combined_ft_b"


class Pairing:
    """A rule pairing the stored field with a partner field."""

    KIND: PairingKind
    REQUIRES_TRANSFORM = False  # Whether a spatial transform F is needed
    REQUIRES_DUAL = False  # Whether the H₋ partner trajectory is needed
    REQUIRES_HERMITIAN = False  # Whether conservation needs W = 0
    REQUIRED_TAG: SymmetryTag | None = None  # Symmetry of H under F needed for conservation

    def __init__(self, transform: SpatialTransform | None = None):
        if self.REQUIRES_TRANSFORM and transform is None:
            raise MissingTransform(f"{self.KIND.value} needs a spatial transform")
        if not self.REQUIRES_TRANSFORM and transform is not None:
            raise ValueError(f"{self.KIND.value} does not take a spatial transform")
        self.transform = transform

    def __repr__(self):
        if self.transform is None:
            return f"{type(self).__name__}()"
        return f"{type(self).__name__}({self.transform.kind.value})"

    def partner(self, trajectory: Trajectory, positions: np.ndarray) -> np.ndarray:
        """Left partner samples at the given array positions of the trajectory."""
        raise NotImplementedError()

    def check(self, trajectory: Trajectory):
        if self.transform is not None and self.transform.grid != trajectory.grid:
            raise GridMismatch("transform and trajectory live on different grids")

    def fields(self, trajectory: Trajectory, positions) -> tuple[np.ndarray, np.ndarray]:
        self.check(trajectory)
        positions = np.asarray(positions)
        return self.partner(trajectory, positions), trajectory.plus[positions]


class OrdinaryPairing(Pairing):
    KIND = PairingKind.ordinary
    REQUIRES_HERMITIAN = True

    def partner(self, trajectory, positions):
        return np.conj(trajectory.plus[positions])


class MixedPairing(Pairing):
    KIND = PairingKind.mixed
    REQUIRES_DUAL = True

    def partner(self, trajectory, positions):
        return np.conj(trajectory.branch("minus")[positions])


class BitemporalPairing(Pairing):
    KIND = PairingKind.bitemporal_t_a
    REQUIRED_TAG = SymmetryTag.no_symmetry

    def partner(self, trajectory, positions):
        return trajectory.plus[2 * trajectory.steps - positions]


class BilocalPairing(Pairing):
    KIND = PairingKind.bilocal_f_c
    REQUIRES_TRANSFORM = True
    REQUIRED_TAG = SymmetryTag.ft_symmetric

    def partner(self, trajectory, positions):
        return np.conj(self.transform.apply_values(trajectory.plus[positions]))


class CombinedPairing(Pairing):
    KIND = PairingKind.combined_ft_b
    REQUIRES_TRANSFORM = True
    REQUIRED_TAG = SymmetryTag.f_symmetric

    def partner(self, trajectory, positions):
        return self.transform.apply_values(
            trajectory.plus[2 * trajectory.steps - positions]
        )


PAIRINGS = {
    cls.KIND: cls
    for cls in (
        OrdinaryPairing,
        MixedPairing,
        BitemporalPairing,
        BilocalPairing,
        CombinedPairing,
    )
}


def make_pairing(
    kind: PairingKind | str, transform: SpatialTransform | None = None
) -> Pairing:
    return PAIRINGS[PairingKind(kind)](transform)


def pairing_class(kind: PairingKind | str) -> type[Pairing]:
    return PAIRINGS[PairingKind(kind)]


def _density(left, right):
    return left * right


def _current(left, right, grid) -> tuple[np.ndarray, ...]:
    grad_left = gradient_values(left, grid)
    grad_right = gradient_values(right, grid)
    return tuple(
        (left * gr - right * gl) / 2j
        for gl, gr in zip(grad_left, grad_right, strict=True)
    )


def pair_density(pairing: Pairing, trajectory: Trajectory, m: int) -> ComplexField:
    p = trajectory.position(m)
    left, right = pairing.fields(trajectory, p)
    return ComplexField(trajectory.grid, _density(left, right), time_tag=m * trajectory.dt)


def pair_current(pairing: Pairing, trajectory: Trajectory, m: int) -> VectorField:
    """Current of a pairing at time index ``m``.

    The gradient of the transformed partner is taken after composing with
    F, that is at x of the field ``x -> Ψ(Fx)``.
    """
    p = trajectory.position(m)
    left, right = pairing.fields(trajectory, p)
    return VectorField(trajectory.grid, _current(left, right, trajectory.grid))


def _check_interior(trajectory: Trajectory, m: int):
    if abs(m) > trajectory.steps - 1:
        raise IndexOutOfRange(
            f"time index {m} has no central difference in ±{trajectory.steps}"
        )


def continuity_residual(
    pairing: Pairing, trajectory: Trajectory, m: int
) -> tuple[ComplexField, float]:
    """Return ``(rho(m+1) - rho(m-1)) / 2dt + div J(m)`` and its L² norm.

    :raises IndexOutOfRange: unless ``|m| <= steps - 1``.
    """
    _check_interior(trajectory, m)
    grid = trajectory.grid
    p = trajectory.position(m)
    left, right = pairing.fields(trajectory, np.array([p - 1, p, p + 1]))
    rho = _density(left, right)
    current = _current(left[1], right[1], grid)
    values = (rho[2] - rho[0]) / (2.0 * trajectory.dt) + divergence_values(current, grid)
    field = ComplexField(grid, values, time_tag=m * trajectory.dt)
    return field, float(l2_norm_values(values, grid))


def is_applicable(
    kind: PairingKind | str,
    classification: frozenset[SymmetryCase] | set[SymmetryTag],
    hermitian: bool = False,
) -> bool:
    """Whether the symmetry of H guarantees conservation for a kind.

    ``classification`` is the result of classify_symmetry for the
    transform of the run, or the bare set of tags.
    """
    cls = pairing_class(kind)
    if cls.REQUIRES_HERMITIAN:
        return hermitian
    if cls.REQUIRED_TAG in (None, SymmetryTag.no_symmetry):
        return True
    tags = {getattr(case, "tag", case) for case in classification}
    return cls.REQUIRED_TAG in tags


def _nanmax(values: np.ndarray) -> float:
    # a trajectory without interior times has no residual at all
    finite = values[~np.isnan(values)]
    return float(np.max(finite)) if finite.size else float("nan")


@dataclasses.dataclass(frozen=True, eq=False)
class ConservationReport:
    """Charge, boundary flux and continuity residual of one pairing.

    ``residual_norm`` and ``balance`` are NaN at the two end times where no
    central difference exists. ``balance`` is ``dC/dt + flux`` there.
    """

    kind: PairingKind
    classification: tuple[str, ...]
    times: np.ndarray
    charge: np.ndarray
    flux: np.ndarray
    residual_norm: np.ndarray
    balance: np.ndarray
    applicable: bool = True

    @property
    def max_residual(self) -> float:
        return _nanmax(self.residual_norm)

    @property
    def max_balance(self) -> float:
        return _nanmax(np.abs(self.balance))

    @property
    def drift(self) -> float:
        """``max |C(t) - C(0)| / |C(0)|``, absolute when C(0) vanishes."""
        initial = self.charge[len(self.charge) // 2]
        scale = abs(initial) if abs(initial) > 0 else 1.0
        return float(np.max(np.abs(self.charge - initial)) / scale)

    def rows(self) -> list[tuple[float, ...]]:
        return [
            (t, c.real, c.imag, f.real, f.imag, r)
            for t, c, f, r in zip(
                self.times, self.charge, self.flux, self.residual_norm, strict=True
            )
        ]

    def summary(self) -> dict:
        return {
            "kind": self.kind.value,
            "classification": list(self.classification),
            "applicable": self.applicable,
            "max_residual": self.max_residual,
            "max_balance": self.max_balance,
            "drift": self.drift,
        }


def charge_series(
    pairing: Pairing,
    trajectory: Trajectory,
    classification: frozenset[SymmetryCase] | None = None,
    hermitian: bool = False,
) -> ConservationReport:
    """Integrate density, flux and residual of a pairing over all stored times."""
    grid = trajectory.grid
    positions = np.arange(2 * trajectory.steps + 1)
    left, right = pairing.fields(trajectory, positions)
    rho = _density(left, right)
    current = _current(left, right, grid)

    charge = np.asarray(integrate_values(rho, grid), dtype=complex)
    flux = np.broadcast_to(
        np.asarray(boundary_flux_values(current, grid), dtype=complex), charge.shape
    ).copy()

    residual = np.full(charge.shape, np.nan)
    balance = np.full(charge.shape, np.nan, dtype=complex)
    rate = (rho[2:] - rho[:-2]) / (2.0 * trajectory.dt)
    interior = tuple(component[1:-1] for component in current)
    residual[1:-1] = l2_norm_values(rate + divergence_values(interior, grid), grid)
    balance[1:-1] = (charge[2:] - charge[:-2]) / (2.0 * trajectory.dt) + flux[1:-1]

    cases = classification or frozenset()
    tags = tuple(sorted({case.tag.value for case in cases}))
    applicable = (
        is_applicable(pairing.KIND, cases, hermitian)
        if classification is not None
        else True
    )
    logging.getLogger("charge_series").debug(
        "%s: %d snapshots, classification %s", pairing.KIND.value, len(charge), tags
    )
    return ConservationReport(
        pairing.KIND,
        tags,
        trajectory.times,
        charge,
        flux,
        residual,
        balance,
        applicable,
    )


class StationaryProfile(NamedTuple):
    current: VectorField
    spread: float


STATIONARY_KINDS = (PairingKind.bilocal_f_c, PairingKind.combined_ft_b)


def stationary_current_profile(
    kind: PairingKind | str, state: StationaryState, F: SpatialTransform
) -> StationaryProfile:
    """Spatial part of the bilocal or combined current of an eigenstate.

    The spread is ``max - min`` over interior points, taken on the real
    and imaginary parts separately; it vanishes for a true invariant.
    """
    kind = PairingKind(kind)
    grid = state.field.grid
    if grid.dim != 1:
        raise NotOneDimensional("stationary current profiles are 1D")
    if kind not in STATIONARY_KINDS:
        raise ValueError(f"no stationary profile for {kind.value}")
    if F.grid != grid:
        raise GridMismatch("transform and state live on different grids")
    psi = state.field.values
    partner = F.apply_values(psi)
    if kind is PairingKind.bilocal_f_c:
        partner = np.conj(partner)
    (current,) = _current(partner, psi, grid)
    interior = current if grid.is_periodic(0) else current[1:-1]
    spread = max(np.ptp(interior.real), np.ptp(interior.imag))
    return StationaryProfile(VectorField(grid, (current,)), float(spread))


def stationary_time_factor(kind: PairingKind | str, energy: complex) -> float:
    """Growth rate ``g`` of the ``exp(g t)`` dressing of a stationary current."""
    kind = PairingKind(kind)
    if kind is PairingKind.bilocal_f_c:
        return 2.0 * complex(energy).imag
    if kind is PairingKind.combined_ft_b:
        return 0.0
    raise ValueError(f"no stationary profile for {kind.value}")
