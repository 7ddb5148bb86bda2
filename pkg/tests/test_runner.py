import json
import math

import numpy as np
import pytest

from symcurrents.conservation import PairingKind
from symcurrents.report import write_report
from symcurrents.runner import ScenarioRunner
from symcurrents.runner import Verdict
from symcurrents.runner import decide_verdict
from symcurrents.runner import run_scenario
from symcurrents.scenario import Scenario
from symcurrents.utils import ConfigError
from tests.utils import scenario_document
from tests.utils import write_scenario


def run(**overrides):
    scenario = Scenario.model_validate(scenario_document(**overrides))
    return ScenarioRunner(scenario).run()


def files(directory):
    return {
        path.relative_to(directory).as_posix(): path.read_bytes()
        for path in sorted(directory.rglob("*"))
        if path.is_file()
    }


class TestVerdicts:
    @pytest.fixture(scope="class")
    def result(self):
        return run(
            kinds=["mixed", "bilocal_f_c", "combined_ft_b"],
            negative_controls=["ordinary"],
        )

    def test_applicable_kinds_are_conserved(self, result):
        verdicts = {outcome.kind: outcome.verdict for outcome in result.outcomes}
        assert verdicts[PairingKind.mixed] is Verdict.conserved
        assert verdicts[PairingKind.bilocal_f_c] is Verdict.conserved

    def test_failed_symmetry_is_not_applicable(self, result):
        (outcome,) = [o for o in result.outcomes if o.kind is PairingKind.combined_ft_b]
        assert outcome.verdict is Verdict.not_applicable
        assert not outcome.report.applicable

    def test_negative_control_drifts(self, result):
        outcome = result.outcomes[-1]
        assert outcome.kind is PairingKind.ordinary
        assert outcome.negative_control
        assert outcome.verdict is Verdict.violated
        assert outcome.line().startswith("ordinary: VIOLATED (negative control) drift=")

    def test_classification(self, result):
        assert result.classification == ["c"]
        assert result.outcomes[0].line().endswith("classification=c")

    def test_energy_rows(self, result):
        assert len(result.energy_rows) == 9
        assert [row[0] for row in result.energy_rows] == list(range(-4, 5))
        assert result.energy_variation(2) < 1e-10
        assert result.energy_variation(4) > 1e-6

    @pytest.mark.parametrize(
        "drift,applicable,negative,expected",
        [
            (1e-12, True, False, Verdict.conserved),
            (1e-3, True, False, Verdict.violated),
            (1e-3, False, False, Verdict.not_applicable),
            (1e-12, False, False, Verdict.not_applicable),
            (1e-3, False, True, Verdict.violated),
            (1e-12, False, True, Verdict.conserved),
        ],
    )
    def test_decide_verdict(self, result, drift, applicable, negative, expected):
        report = result.outcomes[0].report
        charge = np.full_like(report.charge, 1.0)
        charge[0] += drift
        forged = type(report)(
            report.kind,
            report.classification,
            report.times,
            charge,
            report.flux,
            report.residual_norm,
            report.balance,
            applicable,
        )
        assert decide_verdict(forged, 1e-8, negative) is expected


class TestScenarioRunner:
    def test_empty_kinds(self):
        result = run(kinds=[], transform=None)
        assert result.outcomes == []
        assert result.summary()["verdicts"] == []
        assert not result.trajectory.is_dual

    def test_zero_steps(self):
        result = run(steps=0)
        assert [row[0] for row in result.energy_rows] == [0]
        for outcome in result.outcomes:
            assert outcome.verdict is Verdict.conserved
            assert outcome.report.drift == 0.0
            assert math.isnan(outcome.report.max_residual)

    def test_lagrangian_rows(self):
        result = run(lagrangian=True)
        assert len(result.lagrangian_rows) == 7
        assert result.lagrangian_rows[0]["m"] == -3

    def test_stationary_profiles(self):
        result = run(initial={"preset": "eigenstate", "shift": 0.4})
        assert set(result.profiles) == {PairingKind.bilocal_f_c, PairingKind.combined_ft_b}
        profile, rate = result.profiles[PairingKind.combined_ft_b]
        assert rate == 0.0

    def test_summary(self):
        summary = run().summary()
        assert list(summary) == [
            "scenario",
            "refine",
            "dt",
            "steps",
            "method",
            "grid",
            "dual",
            "hermitian",
            "classification",
            "energy_variation",
            "verdicts",
        ]
        assert summary["grid"]["bc"] == ["dirichlet"]
        assert summary["verdicts"][0]["verdict"] == "CONSERVED"


class TestReport:
    def test_report_files(self, tmp_path):
        result = run(lagrangian=True, stride=2)
        write_report(result, tmp_path)
        names = set(files(tmp_path))
        assert {
            "conservation_mixed.csv",
            "conservation_mixed.json",
            "conservation_bilocal_f_c.csv",
            "conservation_bilocal_f_c.json",
            "energy.csv",
            "lagrangian.csv",
            "summary.json",
            "snapshots/index.csv",
            "snapshots/plus_-000004.csv",
            "snapshots/minus_+000002.csv",
        } <= names
        assert "stationary.json" not in names

    def test_conservation_csv(self, tmp_path):
        write_report(run(), tmp_path)
        lines = (tmp_path / "conservation_mixed.csv").read_text().splitlines()
        assert lines[0] == "t,re_charge,im_charge,re_flux,im_flux,residual_l2"
        assert len(lines) == 10
        assert lines[1].endswith(",nan")

    def test_summary_json_has_no_nan(self, tmp_path):
        write_report(run(lagrangian=True), tmp_path)
        payload = json.loads((tmp_path / "summary.json").read_text())
        assert payload["scenario"] == "small"
        for verdict in payload["verdicts"]:
            assert math.isfinite(verdict["max_residual"])

    def test_stationary_outputs(self, tmp_path):
        write_report(run(initial={"preset": "eigenstate", "shift": 0.4}), tmp_path)
        payload = json.loads((tmp_path / "stationary.json").read_text())
        assert set(payload["profiles"]) == {"bilocal_f_c", "combined_ft_b"}
        assert abs(payload["energy"][0] - 0.545) < 0.05
        lines = (tmp_path / "stationary_bilocal_f_c.csv").read_text().splitlines()
        assert lines[0] == "x,re_current,im_current"
        assert len(lines) == 50

    def test_stride(self, tmp_path):
        write_report(run(steps=20, stride=10, kinds=["bitemporal_t_a"]), tmp_path)
        snapshots = sorted(
            name for name in files(tmp_path) if name.startswith("snapshots/plus_")
        )
        assert snapshots == [
            "snapshots/plus_+000000.csv",
            "snapshots/plus_+000010.csv",
            "snapshots/plus_+000020.csv",
            "snapshots/plus_-000010.csv",
            "snapshots/plus_-000020.csv",
        ]
        index = (tmp_path / "snapshots" / "index.csv").read_text().splitlines()
        assert len(index) == 6

    def test_unwritable_directory(self, tmp_path):
        target = tmp_path / "taken"
        target.write_text("")
        with pytest.raises(ConfigError, match="cannot write report"):
            write_report(run(), target)


class TestRunScenario:
    def test_verdict_lines(self, tmp_path, capsys):
        path = write_scenario(tmp_path)
        assert run_scenario(path) == 0
        lines = capsys.readouterr().out.splitlines()
        assert [line.split(":")[0] for line in lines] == ["mixed", "bilocal_f_c"]
        assert all(": CONSERVED drift=" in line for line in lines)

    def test_repeat_runs_are_identical(self, tmp_path):
        path = write_scenario(tmp_path, lagrangian=True)
        assert run_scenario(path, out=tmp_path / "a") == 0
        assert run_scenario(path, out=tmp_path / "b") == 0
        assert files(tmp_path / "a") == files(tmp_path / "b")

    def test_overrides(self, tmp_path):
        path = write_scenario(tmp_path)
        assert run_scenario(path, out=tmp_path / "out", dt=0.02, steps=3, refine=1) == 0
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["steps"] == 6
        assert summary["dt"] == pytest.approx(0.01)
        assert summary["refine"] == 1
        assert summary["grid"]["n"] == [99]

    def test_invalid_scenario(self, tmp_path, capsys):
        path = write_scenario(tmp_path, dt=-0.1)
        assert run_scenario(path) == 1
        assert "invalid scenario" in capsys.readouterr().err

    def test_unusable_preset_parameter(self, tmp_path, capsys):
        path = write_scenario(
            tmp_path, hamiltonian={"V": {"preset": "harmonic", "omega": "fast"}}
        )
        assert run_scenario(path) == 1
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "preset 'harmonic'" in captured.err

    def test_unknown_scenario(self, capsys):
        assert run_scenario("no_such_scenario") == 1
        assert capsys.readouterr().err.startswith("error: ")

    def test_solver_failure(self, tmp_path, capsys):
        path = write_scenario(
            tmp_path,
            grid={"lower": [-2.0, -2.0], "upper": [2.0, 2.0], "n": [9, 9], "bc": ["dirichlet"] * 2},
            hamiltonian={"V": {"preset": "harmonic"}},
            initial={"preset": "gaussian", "center": [0.0, 0.0]},
        )
        assert run_scenario(path) == 2
        assert capsys.readouterr().out == ""

    def test_overflow_writes_partial_snapshots(self, tmp_path, capsys):
        path = write_scenario(
            tmp_path,
            grid={"lower": [-4.0], "upper": [4.0], "n": [32], "bc": ["periodic"]},
            hamiltonian={"W": {"preset": "constant", "value": 1.0}},
            transform=None,
            initial={"preset": "plane_wave", "wavenumber": 0.0},
            dt=1.98,
            steps=10,
            kinds=[],
        )
        out = tmp_path / "out"
        assert run_scenario(path, out=out) == 3
        assert "step 6" in capsys.readouterr().err
        partial = sorted(p.name for p in (out / "snapshots").iterdir())
        assert partial == [f"partial_+{m:06d}.csv" for m in range(6)]
        assert not (out / "summary.json").exists()

    def test_report_write_failure(self, tmp_path, capsys):
        path = write_scenario(tmp_path)
        target = tmp_path / "taken"
        target.write_text("")
        assert run_scenario(path, out=target) == 1
        assert "cannot write report" in capsys.readouterr().err
