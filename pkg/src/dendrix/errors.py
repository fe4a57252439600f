"""Exception types shared across the package."""

__all__ = [
    "DendrixError",
    "GridMismatchError",
    "ConfigError",
    "DivergenceError",
    "SnapshotFormatError",
    "RelaxationError",
]


class DendrixError(Exception):
    """Base class for all package-specific errors."""


class GridMismatchError(DendrixError, ValueError):
    """Raised when an operation combines fields living on different grids."""


class ConfigError(DendrixError, ValueError):
    """Invalid configuration input.

    Parameters
    ----------
    message : str
        Human-readable description of the problem.
    key : str, optional
        Dotted key path (``section.name``) of the offending entry.
    line : int, optional
        1-based line number in the config file, when known.
    """

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        parts = []
        if key is not None:
            parts.append(f"key '{key}'")
        if line is not None:
            parts.append(f"line {line}")
        if parts:
            message = f"{message} [{', '.join(parts)}]"
        super().__init__(message)


class DivergenceError(DendrixError, RuntimeError):
    """Raised when the solver produces non-finite values.

    Attributes
    ----------
    step : int
        Index of the step at which divergence was detected.
    """

    def __init__(self, step, detail=""):
        self.step = step
        msg = f"solution diverged at step {step}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class SnapshotFormatError(DendrixError, ValueError):
    """Raised when a snapshot file or its sidecar header is malformed."""


class RelaxationError(DendrixError, RuntimeError):
    """Internal consistency failure in the auxiliary-variable relaxation."""
