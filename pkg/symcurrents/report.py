"""CSV and JSON writers for run results.

Every file name depends only on the scenario, so two runs of the same
scenario produce byte-identical directories. Floats are written with
``repr`` and NaN becomes ``nan`` in CSV and ``null`` in JSON.
"""

import csv
import json
import math
from pathlib import Path

from symcurrents.conservation import ConservationReport
from symcurrents.grid import ComplexField
from symcurrents.snapshots import write_field
from symcurrents.utils import ConfigError

CONSERVATION_COLUMNS = ("t", "re_charge", "im_charge", "re_flux", "im_flux", "residual_l2")
ENERGY_COLUMNS = (
    "m",
    "t",
    "re_mixed",
    "im_mixed",
    "re_hermitian",
    "im_hermitian",
)
INDEX_COLUMNS = ("m", "t", "branch", "file", "max_abs", "solve_residual")


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_jsonable(v) for v in value]
    return value


def write_csv(path: Path, columns, rows):
    with path.open("w", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if isinstance(row, dict):
                row = [row[c] for c in columns]
            writer.writerow([_cell(v) for v in row])


def write_json(path: Path, payload):
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=False) + "\n")


def snapshot_name(branch: str, m: int) -> str:
    return f"{branch}_{m:+07d}.csv"


def write_conservation(report: ConservationReport, directory: Path):
    stem = f"conservation_{report.kind.value}"
    write_csv(
        directory / f"{stem}.csv",
        CONSERVATION_COLUMNS,
        [tuple(float(v) for v in row) for row in report.rows()],
    )
    write_json(directory / f"{stem}.json", report.summary())


def write_snapshots(result, directory: Path):
    """Every ``stride``-th snapshot of each branch plus ``index.csv``."""
    trajectory = result.trajectory
    snapshots = directory / "snapshots"
    snapshots.mkdir(exist_ok=True)
    branches = ["plus", "minus"] if trajectory.is_dual else ["plus"]
    rows = []
    for m in trajectory.indices:
        if m % result.scenario.stride:
            continue
        p = trajectory.position(m)
        for branch in branches:
            name = snapshot_name(branch, m)
            write_field(trajectory.snapshot(m, branch), snapshots / name)
            rows.append(
                (
                    m,
                    float(m * trajectory.dt),
                    branch,
                    name,
                    float(trajectory.max_abs[p]),
                    float(trajectory.solve_residual[p]),
                )
            )
    write_csv(snapshots / "index.csv", INDEX_COLUMNS, rows)


def write_partial_snapshots(snapshots: dict[int, ComplexField], directory: Path | str):
    """Write the snapshots computed before an overflow abort."""
    directory = Path(directory) / "snapshots"
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for m, field in sorted(snapshots.items()):
            write_field(field, directory / snapshot_name("partial", m))
    except OSError as e:
        raise ConfigError(f"cannot write partial snapshots to {directory}: {e}") from e


def write_stationary(result, directory: Path):
    state = result.setup.stationary
    payload = {
        "energy": [state.energy.real, state.energy.imag],
        "residual": state.residual,
        "shift": [state.shift.real, state.shift.imag],
        "iterations": state.iterations,
        "profiles": {},
    }
    for kind, (profile, rate) in result.profiles.items():
        payload["profiles"][kind.value] = {
            "spread": profile.spread,
            "time_growth_rate": rate,
        }
        (current,) = profile.current.components
        write_csv(
            directory / f"stationary_{kind.value}.csv",
            ("x", "re_current", "im_current"),
            [
                (float(x), float(j.real), float(j.imag))
                for x, j in zip(result.setup.grid.axis(0), current, strict=True)
            ],
        )
    write_json(directory / "stationary.json", payload)


def write_report(result, directory: Path | str) -> Path:
    """Write every output of a run into ``directory``.

    :raises ConfigError: on I/O errors, with the offending path.
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for report in result.reports:
            write_conservation(report, directory)
        if result.lagrangian_rows is not None:
            columns = list(result.lagrangian_rows[0]) if result.lagrangian_rows else []
            write_csv(directory / "lagrangian.csv", columns, result.lagrangian_rows)
        write_csv(directory / "energy.csv", ENERGY_COLUMNS, result.energy_rows)
        if result.setup.stationary is not None:
            write_stationary(result, directory)
        write_snapshots(result, directory)
        write_json(directory / "summary.json", result.summary())
    except OSError as e:
        raise ConfigError(f"cannot write report to {directory}: {e}") from e
    return directory
