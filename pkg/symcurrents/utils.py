import importlib.resources
import json


class SymcurrentsException(Exception):
    """Base class of every error raised on purpose by symcurrents.

    ``exit_code`` is the process exit status the command-line front end
    reports for the error.
    """

    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ConfigError(SymcurrentsException):
    """A scenario document is inconsistent beyond what its schema checks."""


class GridMismatch(SymcurrentsException):
    """Two objects that must live on the same grid do not."""


class IncompatibleGrid(SymcurrentsException):
    """A transform cannot be realized exactly on the requested grid."""


class NonIntegerOffset(SymcurrentsException):
    """Translations must move the lattice by whole cells."""


class NonPeriodicGrid(SymcurrentsException):
    """The spectral propagator needs every axis to be periodic."""

    exit_code = 2


class NotOneDimensional(SymcurrentsException):
    """The operation is only defined on one-dimensional grids."""


class MissingSnapshot(SymcurrentsException):
    """A trajectory does not hold the snapshot a pairing needs."""


class MissingTransform(SymcurrentsException):
    """A bilocal pairing was requested without a spatial transform."""


class IndexOutOfRange(SymcurrentsException):
    """A central time difference was requested at the trajectory edge."""


class SolverBreakdown(SymcurrentsException):
    """A linear solve hit a singular system.

    :param step: time index at which the breakdown happened, when known.
    """

    exit_code = 2

    def __init__(self, message: str, step: int | None = None):
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message)
        self.step = step


class NoConvergence(SymcurrentsException):
    exit_code = 2


class ShiftIsEigenvalue(SymcurrentsException):
    exit_code = 2


class FieldOverflow(SymcurrentsException):
    """A non-Hermitian run grew beyond the overflow guard.

    The snapshots computed before the abort are kept in ``snapshots``,
    keyed by time index.
    """

    exit_code = 3

    def __init__(self, message: str, step: int, snapshots: dict | None = None):
        super().__init__(f"{message} (step {step})")
        self.step = step
        self.snapshots = snapshots or {}


def load_json_resource(*parts: str):
    """Load a JSON document from the symcurrents package resources."""
    fp = importlib.resources.files("symcurrents") / "resources"
    for part in parts:
        fp = fp / part
    with fp.open() as f:
        return json.load(f)


def list_json_resources(*parts: str) -> list[str]:
    """Return the sorted stem names of the JSON documents in a resource directory."""
    directory = importlib.resources.files("symcurrents") / "resources"
    for part in parts:
        directory = directory / part
    return sorted(
        entry.name.removesuffix(".json")
        for entry in directory.iterdir()
        if entry.name.endswith(".json")
    )
