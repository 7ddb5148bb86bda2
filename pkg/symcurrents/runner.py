import dataclasses
import logging
import sys
from enum import Enum
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from symcurrents.conservation import STATIONARY_KINDS
from symcurrents.conservation import ConservationReport
from symcurrents.conservation import PairingKind
from symcurrents.conservation import StationaryProfile
from symcurrents.conservation import charge_series
from symcurrents.conservation import make_pairing
from symcurrents.conservation import pairing_class
from symcurrents.conservation import stationary_current_profile
from symcurrents.conservation import stationary_time_factor
from symcurrents.grid import integrate_values
from symcurrents.hamiltonian import classify_symmetry
from symcurrents.hamiltonian import symmetry_tags
from symcurrents.lagrangian import lagrangian_diagnostics
from symcurrents.propagator import Trajectory
from symcurrents.propagator import evolve_dual
from symcurrents.propagator import evolve_two_sided
from symcurrents.report import write_partial_snapshots
from symcurrents.report import write_report
from symcurrents.scenario import Scenario
from symcurrents.scenario import Setup
from symcurrents.scenario import load_scenario
from symcurrents.symmetry import TransformKind
from symcurrents.symmetry import make_transform
from symcurrents.utils import FieldOverflow
from symcurrents.utils import SymcurrentsException


class Verdict(str, Enum):
    conserved = "CONSERVED"
    violated = "VIOLATED"
    not_applicable = "NOT-APPLICABLE"


@dataclasses.dataclass(frozen=True)
class KindOutcome:
    kind: PairingKind
    verdict: Verdict
    report: ConservationReport
    negative_control: bool = False

    def line(self) -> str:
        tags = ",".join(self.report.classification) or "-"
        suffix = " (negative control)" if self.negative_control else ""
        return (
            f"{self.kind.value}: {self.verdict.value}{suffix} "
            f"drift={self.report.drift:.3e} classification={tags}"
        )

    def summary(self) -> dict:
        return {
            **self.report.summary(),
            "verdict": self.verdict.value,
            "negative_control": self.negative_control,
        }


def decide_verdict(
    report: ConservationReport, threshold: float, negative_control: bool
) -> Verdict:
    """Map a conservation report to a verdict.

    Drift decides for applicable kinds and negative controls. Other kinds
    whose symmetry check failed are not applicable.
    """
    if not report.applicable and not negative_control:
        return Verdict.not_applicable
    if report.drift < threshold:
        return Verdict.conserved
    return Verdict.violated


@dataclasses.dataclass
class RunResult:
    scenario: Scenario
    setup: Setup
    trajectory: Trajectory
    classification: list[str]
    outcomes: list[KindOutcome]
    energy_rows: list[tuple]
    lagrangian_rows: list[dict] | None = None
    profiles: dict[PairingKind, tuple[StationaryProfile, float]] = dataclasses.field(
        default_factory=dict
    )
    refine: int = 0

    @property
    def reports(self) -> list[ConservationReport]:
        return [outcome.report for outcome in self.outcomes]

    def energy_variation(self, column: int) -> float:
        """``max |E(t) - E(0)| / |E(0)|`` of an energy.csv column pair."""
        values = np.array([complex(row[column], row[column + 1]) for row in self.energy_rows])
        initial = values[len(values) // 2]
        scale = abs(initial) if abs(initial) > 0 else 1.0
        return float(np.max(np.abs(values - initial)) / scale)

    def summary(self) -> dict:
        grid = self.setup.grid
        return {
            "scenario": self.scenario.name,
            "refine": self.refine,
            "dt": self.setup.dt,
            "steps": self.setup.steps,
            "method": self.trajectory.method.value,
            "grid": {
                "n": list(grid.n),
                "dx": list(grid.dx),
                "origin": list(grid.origin),
                "bc": [b.value for b in grid.bc],
            },
            "dual": self.trajectory.is_dual,
            "hermitian": self.setup.hamiltonian.is_hermitian,
            "classification": self.classification,
            "energy_variation": {
                "mixed": self.energy_variation(2),
                "hermitian": self.energy_variation(4),
            },
            "verdicts": [outcome.summary() for outcome in self.outcomes],
        }


class ScenarioRunner:
    """Classify, evolve and analyze one scenario."""

    def __init__(self, scenario: Scenario, refine: int = 0):
        self.scenario = scenario
        self.refine = refine
        self.log = logging.getLogger("ScenarioRunner")

    def classify(self, setup: Setup):
        transform = setup.transform or make_transform(TransformKind.identity, setup.grid)
        cases = classify_symmetry(setup.hamiltonian, transform)
        self.log.info(
            "classification under %s: %s",
            transform.kind.value,
            ",".join(tag.value for tag in symmetry_tags(cases)),
        )
        return cases

    def evolve(self, setup: Setup) -> Trajectory:
        self.log.info(
            "evolving %s trajectory, dt=%g steps=±%d",
            "dual" if setup.needs_dual else "single",
            setup.dt,
            setup.steps,
        )
        if setup.needs_dual:
            return evolve_dual(
                setup.hamiltonian,
                setup.psi_plus,
                setup.psi_minus,
                setup.dt,
                setup.steps,
                self.scenario.method,
                self.scenario.kinetic,
            )
        return evolve_two_sided(
            setup.hamiltonian,
            1,
            setup.psi_plus,
            setup.dt,
            setup.steps,
            self.scenario.method,
            self.scenario.kinetic,
        )

    def analyze(self, setup: Setup, trajectory: Trajectory, cases) -> list[KindOutcome]:
        hermitian = setup.hamiltonian.is_hermitian
        outcomes = []
        for kind in self.scenario.analyzed_kinds:
            transform = setup.transform if pairing_class(kind).REQUIRES_TRANSFORM else None
            pairing = make_pairing(kind, transform)
            report = charge_series(pairing, trajectory, cases, hermitian)
            negative = kind in self.scenario.negative_controls
            verdict = decide_verdict(report, self.scenario.drift_threshold, negative)
            if verdict is Verdict.violated and not negative:
                self.log.warning(
                    "%s applies but drifts by %.3e", kind.value, report.drift
                )
            outcomes.append(KindOutcome(kind, verdict, report, negative))
        return outcomes

    def energy(self, setup: Setup, trajectory: Trajectory) -> list[tuple]:
        h = setup.hamiltonian
        grid = setup.grid
        plus = trajectory.plus
        minus = trajectory.minus if trajectory.is_dual else plus
        mixed = integrate_values(np.conj(minus) * h.apply_values(plus, 1), grid)
        hermitian = integrate_values(
            np.conj(minus) * h.hermitian_part().apply_values(plus, 1), grid
        )
        return [
            (m, float(t), float(a.real), float(a.imag), float(b.real), float(b.imag))
            for m, t, a, b in zip(
                trajectory.indices, trajectory.times, mixed, hermitian, strict=True
            )
        ]

    def profiles(self, setup: Setup) -> dict:
        if setup.stationary is None or setup.transform is None or setup.grid.dim != 1:
            return {}
        result = {}
        for kind in STATIONARY_KINDS:
            profile = stationary_current_profile(kind, setup.stationary, setup.transform)
            rate = stationary_time_factor(kind, setup.stationary.energy)
            self.log.info("%s stationary profile spread %.3e", kind.value, profile.spread)
            result[kind] = (profile, rate)
        return result

    def run(self) -> RunResult:
        self.log.info("building scenario %s (refine %d)", self.scenario.name, self.refine)
        setup = self.scenario.build(self.refine)
        cases = self.classify(setup)
        trajectory = self.evolve(setup)
        self.log.info("analyzing %d kinds", len(self.scenario.analyzed_kinds))
        outcomes = self.analyze(setup, trajectory, cases)
        lagrangian_rows = None
        if self.scenario.lagrangian:
            lagrangian_rows = lagrangian_diagnostics(
                setup.hamiltonian, trajectory, self.scenario.phase_samples()
            )
        return RunResult(
            self.scenario,
            setup,
            trajectory,
            [tag.value for tag in symmetry_tags(cases)],
            outcomes,
            self.energy(setup, trajectory),
            lagrangian_rows,
            self.profiles(setup),
            self.refine,
        )


def _error(message: str):
    print(f"error: {message}", file=sys.stderr)


def run_scenario(
    source: str | Path,
    out: str | Path | None = None,
    dt: float | None = None,
    steps: int | None = None,
    refine: int = 0,
    seed: int | None = None,
) -> int:
    """Run a scenario file or bundled name and print one verdict per kind.

    Return 0 on success, 1 on configuration or I/O errors, 2 on solver
    failures and 3 on overflow.
    """
    log = logging.getLogger("run_scenario")
    try:
        scenario = load_scenario(source).with_overrides(dt=dt, steps=steps, seed=seed)
        result = ScenarioRunner(scenario, refine).run()
    except ValidationError as e:
        _error(f"invalid scenario {source}:\n{e}")
        return 1
    except FieldOverflow as e:
        _error(e.message)
        if out is not None:
            try:
                write_partial_snapshots(e.snapshots, out)
            except SymcurrentsException as write_error:
                _error(write_error.message)
        return e.exit_code
    except SymcurrentsException as e:
        _error(e.message)
        return e.exit_code

    for outcome in result.outcomes:
        print(outcome.line())
    if out is not None:
        try:
            directory = write_report(result, out)
        except SymcurrentsException as e:
            _error(e.message)
            return e.exit_code
        log.info("report written to %s", directory)
    return 0
