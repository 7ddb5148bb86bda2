import dataclasses
import logging
from enum import Enum

import numpy as np

from symcurrents.grid import ComplexField
from symcurrents.grid import Grid
from symcurrents.grid import integrate_values
from symcurrents.grid import l2_norm_values
from symcurrents.hamiltonian import Hamiltonian
from symcurrents.hamiltonian import check_sign
from symcurrents.tridiag import TridiagonalSystem
from symcurrents.utils import FieldOverflow
from symcurrents.utils import GridMismatch
from symcurrents.utils import MissingSnapshot
from symcurrents.utils import NoConvergence
from symcurrents.utils import NonPeriodicGrid
from symcurrents.utils import NotOneDimensional
from symcurrents.utils import ShiftIsEigenvalue
from symcurrents.utils import SolverBreakdown

OVERFLOW_FACTOR = 1e12


class PropagationMethod(str, Enum):
    auto = "auto"
    crank_nicolson = "crank_nicolson"
    split_step = "split_step"


class KineticSymbol(str, Enum):
    """Kinetic energy used by the split-step propagator in Fourier space.

    ``continuum`` is the exact ``k²/2`` and the default. ``lattice`` is the
    eigenvalue of the three-point Laplacian, so a split step of a
    potential-free H matches the finite-difference operator mode by mode.
    """

    lattice = "lattice"
    continuum = "continuum"


class Stepper:
    """Advance the samples of a field by one time step of H±.

    A stepper is prepared once for a Hamiltonian, a sign and a step, then
    called on successive sample arrays. A negative ``dt`` gives the exact
    inverse of the positive step.
    """

    METHOD: PropagationMethod | None = None

    def __init__(self, h: Hamiltonian, sign: int, dt: float):
        self.h = h
        self.sign = check_sign(sign)
        self.dt = float(dt)
        self.last_residual = 0.0
        self.log = logging.getLogger(type(self).__name__)

    def __call__(self, values: np.ndarray) -> np.ndarray:
        raise NotImplementedError()


class CrankNicolson(Stepper):
    """Cayley form ``(1 + i dt/2 H) f' = (1 - i dt/2 H) f`` in 1D.

    Periodic grids get the cyclic solve. ``last_residual`` holds the
    relative residual of the latest linear solve.
    """

    METHOD = PropagationMethod.crank_nicolson

    def __init__(self, h: Hamiltonian, sign: int, dt: float):
        super().__init__(h, sign, dt)
        if h.grid.dim != 1:
            raise NotOneDimensional("Crank-Nicolson solves are implemented in 1D")
        diagonal, off, corner = h.tridiagonal(self.sign)
        self.tau = 0.5j * self.dt
        self.system = TridiagonalSystem(
            1.0 + self.tau * diagonal,
            self.tau * off,
            self.tau * off,
            self.tau * corner,
            self.tau * corner,
        )
        self.log.debug(
            "prepared %s system, n=%d dt=%g sign=%+d",
            "cyclic" if self.system.cyclic else "banded",
            h.grid.n[0],
            self.dt,
            self.sign,
        )

    def __call__(self, values: np.ndarray) -> np.ndarray:
        rhs = values - self.tau * self.h.apply_values(values, self.sign)
        result = self.system.solve(rhs)
        self.last_residual = self.system.relative_residual(result, rhs)
        return result


class SplitStep(Stepper):
    """Strang splitting of the potential and kinetic steps.

    A half potential step, a kinetic step in Fourier space and another half
    potential step. Every axis must be periodic.
    """

    METHOD = PropagationMethod.split_step

    def __init__(
        self,
        h: Hamiltonian,
        sign: int,
        dt: float,
        kinetic: KineticSymbol | str = KineticSymbol.continuum,
    ):
        super().__init__(h, sign, dt)
        grid = h.grid
        if not grid.all_periodic:
            raise NonPeriodicGrid("the split-step propagator needs periodic axes")
        kinetic = KineticSymbol(kinetic)
        wavenumbers = np.meshgrid(
            *(
                2.0 * np.pi * np.fft.fftfreq(n, d=dx)
                for n, dx in zip(grid.n, grid.dx, strict=True)
            ),
            indexing="ij",
        )
        if kinetic is KineticSymbol.lattice:
            energy = sum(
                (1.0 - np.cos(k * dx)) / dx**2
                for k, dx in zip(wavenumbers, grid.dx, strict=True)
            )
        else:
            energy = 0.5 * sum(k**2 for k in wavenumbers)
        self.kinetic_phase = np.exp(-1j * self.dt * energy)
        self.potential_phase = np.exp(-0.5j * self.dt * h.potential(self.sign))
        self.axes = tuple(range(-grid.dim, 0))
        self.log.debug(
            "prepared %s split-step, shape=%s dt=%g sign=%+d",
            kinetic.value,
            grid.shape,
            self.dt,
            self.sign,
        )

    def __call__(self, values: np.ndarray) -> np.ndarray:
        half = self.potential_phase * values
        spectrum = np.fft.fftn(half, axes=self.axes)
        kinetic = np.fft.ifftn(
            self.kinetic_phase * spectrum, axes=self.axes
        )
        return self.potential_phase * kinetic


def make_stepper(
    h: Hamiltonian,
    sign: int,
    dt: float,
    method: PropagationMethod | str = PropagationMethod.auto,
    kinetic: KineticSymbol | str = KineticSymbol.continuum,
) -> Stepper:
    """Pick the propagator for a grid.

    1D grids use Crank-Nicolson, periodic 2D grids the split-step path.
    There is no implicit 2D solver, so 2D Dirichlet grids are rejected.
    """
    method = PropagationMethod(method)
    if method is PropagationMethod.split_step:
        return SplitStep(h, sign, dt, kinetic)
    if h.grid.dim == 1:
        return CrankNicolson(h, sign, dt)
    if not h.grid.all_periodic:
        raise NonPeriodicGrid("2D propagation needs periodic axes")
    if method is PropagationMethod.crank_nicolson:
        logging.getLogger("make_stepper").debug(
            "2D Crank-Nicolson request served by the split-step propagator"
        )
    return SplitStep(h, sign, dt, kinetic)


def _check_field(h: Hamiltonian, f: ComplexField):
    if f.grid != h.grid:
        raise GridMismatch("field and Hamiltonian live on different grids")


def cn_step(h: Hamiltonian, sign: int, f: ComplexField, dt: float) -> ComplexField:
    """Advance a field by one Crank-Nicolson step."""
    _check_field(h, f)
    stepper = make_stepper(h, sign, dt, PropagationMethod.crank_nicolson)
    return f.with_values(stepper(f.values))


def step_splitstep(
    h: Hamiltonian,
    sign: int,
    f: ComplexField,
    dt: float,
    kinetic: KineticSymbol | str = KineticSymbol.continuum,
) -> ComplexField:
    """Advance a field by one Strang step, ``e^{-i dt k²/2}`` for free modes."""
    _check_field(h, f)
    return f.with_values(SplitStep(h, sign, dt, kinetic)(f.values))


@dataclasses.dataclass(frozen=True, eq=False)
class Trajectory:
    """Snapshots of one field or a dual pair at ``t = m dt``, ``|m| <= steps``.

    ``plus`` holds the field evolved with ``sign`` (H₊ for dual pairs),
    ``minus`` the H₋ partner of a dual pair. ``max_abs`` and
    ``solve_residual`` are per-snapshot diagnostics; split-step snapshots
    carry a zero solve residual.
    """

    grid: Grid
    dt: float
    steps: int
    plus: np.ndarray
    max_abs: np.ndarray
    solve_residual: np.ndarray
    minus: np.ndarray | None = None
    sign: int = 1
    method: PropagationMethod = PropagationMethod.auto

    @property
    def is_dual(self) -> bool:
        return self.minus is not None

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(-self.steps, self.steps + 1)

    @property
    def indices(self) -> range:
        return range(-self.steps, self.steps + 1)

    def position(self, m: int) -> int:
        """Array position of time index ``m``."""
        if abs(m) > self.steps:
            raise MissingSnapshot(
                f"time index {m} outside the stored range ±{self.steps}"
            )
        return m + self.steps

    def branch(self, name: str = "plus") -> np.ndarray:
        if name == "plus":
            return self.plus
        if name == "minus":
            if self.minus is None:
                raise MissingSnapshot("trajectory has no dual (minus) branch")
            return self.minus
        raise ValueError(f"unknown branch {name!r}")

    def snapshot(self, m: int, branch: str = "plus") -> ComplexField:
        values = self.branch(branch)[self.position(m)]
        return ComplexField(self.grid, values, time_tag=m * self.dt)


def _evolve_branch(
    h: Hamiltonian,
    sign: int,
    initial: np.ndarray,
    dt: float,
    steps: int,
    method: PropagationMethod,
    kinetic: KineticSymbol,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    if steps < 0:
        raise ValueError(f"the number of steps cannot be negative, got {steps}")
    count = 2 * steps + 1
    out = np.zeros((count,) + h.grid.shape, dtype=complex)
    max_abs = np.zeros(count)
    residual = np.zeros(count)
    out[steps] = initial
    max_abs[steps] = np.max(np.abs(initial))
    limit = OVERFLOW_FACTOR * max_abs[steps]
    computed = [0]

    for direction in (1, -1):
        stepper = make_stepper(h, sign, direction * dt, method, kinetic)
        current = initial
        for k in range(1, steps + 1):
            m = direction * k
            try:
                current = stepper(current)
            except SolverBreakdown as e:
                raise SolverBreakdown(e.message, step=m) from e
            peak = float(np.max(np.abs(current)))
            if limit > 0 and not peak <= limit:
                raise FieldOverflow(
                    f"max|psi| = {peak:.3g} exceeds {OVERFLOW_FACTOR:g} times its initial value",
                    step=m,
                    snapshots={
                        j: ComplexField(h.grid, out[j + steps], time_tag=j * dt)
                        for j in sorted(computed)
                    },
                )
            out[m + steps] = current
            max_abs[m + steps] = peak
            residual[m + steps] = stepper.last_residual
            computed.append(m)
    return out, max_abs, residual


def evolve_two_sided(
    h: Hamiltonian,
    sign: int,
    psi0: ComplexField,
    dt: float,
    steps: int,
    method: PropagationMethod | str = PropagationMethod.auto,
    kinetic: KineticSymbol | str = KineticSymbol.continuum,
) -> Trajectory:
    """Evolve one field with H± forward and backward in time from t = 0.

    :raises SolverBreakdown: on a singular linear system, with its step.
    :raises FieldOverflow: when the field grows past the overflow guard.
    """
    _check_field(h, psi0)
    method = PropagationMethod(method)
    values, max_abs, residual = _evolve_branch(
        h, check_sign(sign), psi0.values, dt, steps, method, KineticSymbol(kinetic)
    )
    return Trajectory(
        h.grid, float(dt), steps, values, max_abs, residual, sign=sign, method=method
    )


def evolve_dual(
    h: Hamiltonian,
    psi_plus0: ComplexField,
    psi_minus0: ComplexField,
    dt: float,
    steps: int,
    method: PropagationMethod | str = PropagationMethod.auto,
    kinetic: KineticSymbol | str = KineticSymbol.continuum,
) -> Trajectory:
    """Evolve ψ₊ with H₊ and ψ₋ with H₋ on the same time lattice."""
    _check_field(h, psi_plus0)
    _check_field(h, psi_minus0)
    method = PropagationMethod(method)
    plus, plus_abs, plus_residual = _evolve_branch(
        h, 1, psi_plus0.values, dt, steps, method, KineticSymbol(kinetic)
    )
    minus, minus_abs, minus_residual = _evolve_branch(
        h, -1, psi_minus0.values, dt, steps, method, KineticSymbol(kinetic)
    )
    return Trajectory(
        h.grid,
        float(dt),
        steps,
        plus,
        np.maximum(plus_abs, minus_abs),
        np.maximum(plus_residual, minus_residual),
        minus=minus,
        sign=1,
        method=method,
    )


@dataclasses.dataclass(frozen=True)
class StationaryState:
    field: ComplexField
    energy: complex
    residual: float
    shift: complex
    iterations: int
    sign: int = 1


def _inverse_iteration(
    h: Hamiltonian, sign: int, shift: complex, tol: float, max_iter: int, seed: int
) -> StationaryState:
    grid = h.grid
    diagonal, off, corner = h.tridiagonal(sign)
    system = TridiagonalSystem(diagonal - shift, off, off, corner, corner)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    x /= l2_norm_values(x, grid)
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        y = system.solve(x)
        x = y / l2_norm_values(y, grid)
        hx = h.apply_values(x, sign)
        energy = complex(integrate_values(np.conj(x) * hx, grid))
        residual = float(l2_norm_values(hx - energy * x, grid))
        if residual <= tol * max(1.0, abs(energy)):
            peak = x[np.argmax(np.abs(x))]
            x = x * np.conj(peak) / abs(peak)
            return StationaryState(
                ComplexField(grid, x), energy, residual, shift, iteration, sign
            )
    raise NoConvergence(
        f"inverse iteration did not converge in {max_iter} iterations "
        f"(residual {residual:.3g}, shift {shift})"
    )


def stationary_state(
    h: Hamiltonian,
    sign: int,
    shift: complex,
    tol: float = 1e-10,
    max_iter: int = 500,
    seed: int = 0,
) -> StationaryState:
    """Find the eigenpair of H± nearest to ``shift`` by inverse iteration.

    The returned field has unit norm and its largest-modulus sample is real
    and positive.

    :raises NoConvergence: if the residual stays above ``tol``.
    :raises ShiftIsEigenvalue: if the shifted matrix is singular twice.
    """
    if h.grid.dim != 1:
        raise NotOneDimensional("stationary states are computed on 1D grids")
    sign = check_sign(sign)
    shift = complex(shift)
    try:
        return _inverse_iteration(h, sign, shift, tol, max_iter, seed)
    except SolverBreakdown:
        perturbed = shift + tol
        logging.getLogger("stationary_state").warning(
            "shift %s hits an eigenvalue, retrying with %s", shift, perturbed
        )
    try:
        return _inverse_iteration(h, sign, perturbed, tol, max_iter, seed)
    except SolverBreakdown as e:
        raise ShiftIsEigenvalue(
            f"shift {shift} is an eigenvalue of the discrete Hamiltonian"
        ) from e


def cayley_factor(energy: complex, dt: float) -> complex:
    """Amplification of an eigenstate of energy ``energy`` over one Crank-Nicolson step."""
    tau = 0.5j * dt
    return (1.0 - tau * energy) / (1.0 + tau * energy)
