"""Two-field Lagrangian checks.

The two-field density ``L = Re[conj(ψ₋) (i ∂ₜψ₊ - H₊ ψ₊)]`` is invariant under
the phase-dilation map ``ψ± -> exp(±φr) exp(iφi) ψ±``. Its Euler-Lagrange
equations are the Schrödinger equations of H± and the two Noether currents
are the real and imaginary parts of the mixed continuity equation.

Time derivatives are central differences of stored snapshots.
"""

import dataclasses
import math
from typing import NamedTuple

import numpy as np

from symcurrents.conservation import MixedPairing
from symcurrents.conservation import continuity_residual
from symcurrents.grid import ComplexField
from symcurrents.grid import RealField
from symcurrents.grid import check_same_grid
from symcurrents.grid import divergence_values
from symcurrents.grid import gradient_values
from symcurrents.grid import integrate_values
from symcurrents.grid import l2_norm_values
from symcurrents.grid import laplacian_values
from symcurrents.hamiltonian import Hamiltonian
from symcurrents.propagator import Trajectory
from symcurrents.utils import IndexOutOfRange


@dataclasses.dataclass(frozen=True)
class PhaseDilation:
    """The map ψ± -> exp(±φr) exp(iφi) ψ±.

    >>> PhaseDilation(0.0, math.pi / 2).matrix(1).round(12).tolist()
    [[0.0, -1.0], [1.0, 0.0]]
    """

    phi_r: float = 0.0
    phi_i: float = 0.0

    def factor(self, sign: int) -> complex:
        return math.exp(sign * self.phi_r) * complex(
            math.cos(self.phi_i), math.sin(self.phi_i)
        )

    def matrix(self, sign: int) -> np.ndarray:
        """Real 2×2 action on the components ``(Re ψ, Im ψ)``."""
        c, s = math.cos(self.phi_i), math.sin(self.phi_i)
        return math.exp(sign * self.phi_r) * np.array([[c, -s], [s, c]])


def _hermitian_apply(h: Hamiltonian, values: np.ndarray) -> np.ndarray:
    return -0.5 * laplacian_values(values, h.grid) + h.V.values * values


def _two_field_density(h, plus, minus, dt_plus):
    return np.real(np.conj(minus) * (1j * dt_plus - h.apply_values(plus, 1)))


def _single_field_density(h, psi, rate):
    r, s = psi.real, psi.imag
    return s * (rate.real - _hermitian_apply(h, s)) - r * (
        rate.imag + _hermitian_apply(h, r)
    )


def two_field_lagrangian_density(
    h: Hamiltonian, psi_plus: ComplexField, psi_minus: ComplexField, dt_plus: ComplexField
) -> RealField:
    """Pointwise ``Re[conj(ψ₋) (i ∂ₜψ₊ - H₊ψ₊)]`` with ∂ₜψ₊ supplied."""
    grid = check_same_grid(h, psi_plus, psi_minus, dt_plus)
    return RealField(
        grid, _two_field_density(h, psi_plus.values, psi_minus.values, dt_plus.values)
    )


def single_field_lagrangian_density(
    h: Hamiltonian, psi: ComplexField, dt_psi: ComplexField
) -> RealField:
    """Real single-field density ``Ψⁱ(∂ₜΨʳ - H∘Ψⁱ) - Ψʳ(∂ₜΨⁱ + H∘Ψʳ)``."""
    grid = check_same_grid(h, psi, dt_psi)
    return RealField(grid, _single_field_density(h, psi.values, dt_psi.values))


def apply_phase_dilation(
    p: PhaseDilation, psi_plus: ComplexField, psi_minus: ComplexField
) -> tuple[ComplexField, ComplexField]:
    return (
        psi_plus.with_values(p.factor(1) * psi_plus.values),
        psi_minus.with_values(p.factor(-1) * psi_minus.values),
    )


def apply_phase_dilation_components(
    p: PhaseDilation, psi_plus: ComplexField, psi_minus: ComplexField
) -> tuple[ComplexField, ComplexField]:
    """Same map as :func:`apply_phase_dilation` through the real 2×2 matrices."""

    def rotate(field, sign):
        (a, b), (c, d) = p.matrix(sign)
        r, s = field.real, field.imag
        return field.with_values((a * r + b * s) + 1j * (c * r + d * s))

    return rotate(psi_plus, 1), rotate(psi_minus, -1)


def invariance_gap(
    h: Hamiltonian,
    psi_plus: ComplexField,
    psi_minus: ComplexField,
    dt_plus: ComplexField,
    dt_minus: ComplexField,
    p: PhaseDilation,
) -> float:
    """``|∫L̃ - ∫L|`` for arbitrary fields and their time derivatives."""
    grid = check_same_grid(h, psi_plus, psi_minus, dt_plus, dt_minus)
    before = integrate_values(
        _two_field_density(h, psi_plus.values, psi_minus.values, dt_plus.values), grid
    )
    new_plus, new_minus = apply_phase_dilation(p, psi_plus, psi_minus)
    new_dt_plus, _ = apply_phase_dilation(p, dt_plus, dt_minus)
    after = integrate_values(
        _two_field_density(h, new_plus.values, new_minus.values, new_dt_plus.values),
        grid,
    )
    return float(abs(after - before))


def _central(values: np.ndarray, positions: np.ndarray, dt: float) -> np.ndarray:
    return (values[positions + 1] - values[positions - 1]) / (2.0 * dt)


def _interior_positions(trajectory: Trajectory, m) -> np.ndarray:
    indices = np.atleast_1d(np.asarray(m))
    if np.any(np.abs(indices) > trajectory.steps - 1):
        raise IndexOutOfRange(
            f"time index {m} has no central difference in ±{trajectory.steps}"
        )
    return indices + trajectory.steps


def invariance_residual(
    h: Hamiltonian, trajectory: Trajectory, p: PhaseDilation, m: int
) -> float:
    """Invariance gap on the dual pair of a trajectory at time index ``m``."""
    (position,) = _interior_positions(trajectory, m)
    positions = np.array([position])
    minus = trajectory.branch("minus")

    def field(values):
        return ComplexField(trajectory.grid, values[0])

    return invariance_gap(
        h,
        field(trajectory.plus[positions]),
        field(minus[positions]),
        field(_central(trajectory.plus, positions, trajectory.dt)),
        field(_central(minus, positions, trajectory.dt)),
        p,
    )


class EulerLagrangeResidual(NamedTuple):
    plus_real: float
    plus_imag: float
    minus_real: float
    minus_imag: float


def _euler_lagrange_norms(h, values, positions, dt, sign):
    grid = h.grid
    psi = values[positions]
    rate = _central(values, positions, dt)
    r, s = psi.real, psi.imag
    W = h.W.values
    real = rate.real - (_hermitian_apply(h, s) + sign * W * r)
    imag = rate.imag - (-_hermitian_apply(h, r) + sign * W * s)
    return l2_norm_values(real, grid), l2_norm_values(imag, grid)


def _euler_lagrange_table(h, trajectory, positions):
    plus_real, plus_imag = _euler_lagrange_norms(
        h, trajectory.plus, positions, trajectory.dt, trajectory.sign
    )
    if trajectory.is_dual:
        minus_real, minus_imag = _euler_lagrange_norms(
            h, trajectory.minus, positions, trajectory.dt, -1
        )
    else:
        minus_real = minus_imag = np.full(len(positions), np.nan)
    return plus_real, plus_imag, minus_real, minus_imag


def euler_lagrange_residual(
    h: Hamiltonian, trajectory: Trajectory, m: int
) -> EulerLagrangeResidual:
    """Return the L² norms of the four real component equations.

    The components are ``∂ₜΨʳ± = H∘Ψⁱ± ± WΨʳ±`` and ``∂ₜΨⁱ± = -H∘Ψʳ± ± WΨⁱ±``.

    The minus entries are NaN on single-field trajectories, whose ``plus``
    branch is checked with the trajectory's sign.
    """
    check_same_grid(h, trajectory)
    positions = _interior_positions(trajectory, m)
    return EulerLagrangeResidual(
        *(float(column[0]) for column in _euler_lagrange_table(h, trajectory, positions))
    )


class SplitResiduals(NamedTuple):
    phase: float
    dilatation: float
    reconstruction_gap: float


def _split_fields(trajectory: Trajectory, positions: np.ndarray):
    grid = trajectory.grid
    plus, minus = trajectory.plus, trajectory.branch("minus")
    dt = trajectory.dt

    def real_parts(values, at):
        return values[at].real, values[at].imag

    rp, ip = real_parts(plus, positions)
    rm, im = real_parts(minus, positions)

    def densities(at):
        r_p, i_p = real_parts(plus, at)
        r_m, i_m = real_parts(minus, at)
        return r_p * r_m + i_p * i_m, r_m * i_p - i_m * r_p

    phase_up, dil_up = densities(positions + 1)
    phase_down, dil_down = densities(positions - 1)

    grad_rp, grad_ip = gradient_values(rp, grid), gradient_values(ip, grid)
    grad_rm, grad_im = gradient_values(rm, grid), gradient_values(im, grid)
    real_current = tuple(
        0.5 * (rm * gip + rp * gim - im * grp - ip * grm)
        for grp, gip, grm, gim in zip(grad_rp, grad_ip, grad_rm, grad_im, strict=True)
    )
    imag_current = tuple(
        0.5 * (rp * grm + ip * gim - rm * grp - im * gip)
        for grp, gip, grm, gim in zip(grad_rp, grad_ip, grad_rm, grad_im, strict=True)
    )
    phase = (phase_up - phase_down) / (2.0 * dt) + divergence_values(real_current, grid)
    dilatation = (dil_up - dil_down) / (2.0 * dt) + divergence_values(
        imag_current, grid
    )
    return phase, dilatation


def split_continuity_residuals(trajectory: Trajectory, m: int) -> SplitResiduals:
    """Residuals of the real and imaginary parts of the mixed continuity equation.

    Phase: density ``Ψʳ₊Ψʳ₋ + Ψⁱ₊Ψⁱ₋`` with current
    ``½(Ψʳ₋∇Ψⁱ₊ + Ψʳ₊∇Ψⁱ₋ - Ψⁱ₋∇Ψʳ₊ - Ψⁱ₊∇Ψʳ₋)``. Dilatation: density
    ``Ψʳ₋Ψⁱ₊ - Ψⁱ₋Ψʳ₊`` with current
    ``½(Ψʳ₊∇Ψʳ₋ + Ψⁱ₊∇Ψⁱ₋ - Ψʳ₋∇Ψʳ₊ - Ψⁱ₋∇Ψⁱ₊)``. ``reconstruction_gap`` is
    the largest pointwise deviation of ``phase + i dilatation`` from the
    mixed residual.
    """
    positions = _interior_positions(trajectory, m)
    phase, dilatation = _split_fields(trajectory, positions)
    mixed, _ = continuity_residual(MixedPairing(), trajectory, int(np.asarray(m)))
    grid = trajectory.grid
    gap = np.max(np.abs(phase[0] + 1j * dilatation[0] - mixed.values))
    return SplitResiduals(
        float(l2_norm_values(phase[0], grid)),
        float(l2_norm_values(dilatation[0], grid)),
        float(gap),
    )


DIAGNOSTIC_COLUMNS = (
    "m",
    "t",
    "el_plus_real",
    "el_plus_imag",
    "el_minus_real",
    "el_minus_imag",
    "split_phase",
    "split_dilatation",
    "action_density_integral",
)


def lagrangian_diagnostics(
    h: Hamiltonian, trajectory: Trajectory, phases: list[PhaseDilation] = ()
) -> list[dict]:
    """Tabulate the diagnostics at every interior time index.

    Each row holds the Euler-Lagrange residuals, the split continuity
    residuals, ∫L and the invariance gaps at ``phases``.

    Dual trajectories use the two-field density, single trajectories the
    single-field one; split and invariance columns are NaN without a dual
    branch.
    """
    check_same_grid(h, trajectory)
    grid = trajectory.grid
    interior = np.arange(-trajectory.steps + 1, trajectory.steps)
    positions = interior + trajectory.steps
    el = _euler_lagrange_table(h, trajectory, positions)
    rate_plus = _central(trajectory.plus, positions, trajectory.dt)
    psi_plus = trajectory.plus[positions]

    if trajectory.is_dual:
        psi_minus = trajectory.minus[positions]
        action = integrate_values(
            _two_field_density(h, psi_plus, psi_minus, rate_plus), grid
        )
        phase, dilatation = _split_fields(trajectory, positions)
        split = (l2_norm_values(phase, grid), l2_norm_values(dilatation, grid))
    else:
        action = integrate_values(_single_field_density(h, psi_plus, rate_plus), grid)
        split = (np.full(len(positions), np.nan),) * 2

    rows = []
    for k, m in enumerate(interior):
        row = {
            "m": int(m),
            "t": float(m * trajectory.dt),
            "el_plus_real": float(el[0][k]),
            "el_plus_imag": float(el[1][k]),
            "el_minus_real": float(el[2][k]),
            "el_minus_imag": float(el[3][k]),
            "split_phase": float(split[0][k]),
            "split_dilatation": float(split[1][k]),
            "action_density_integral": float(action[k]),
        }
        for j, p in enumerate(phases):
            row[f"invariance_{j}"] = (
                invariance_residual(h, trajectory, p, int(m))
                if trajectory.is_dual
                else math.nan
            )
        rows.append(row)
    return rows
