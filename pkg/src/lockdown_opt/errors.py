"""Exception hierarchy shared across the package."""

from __future__ import annotations


class LockdownOptError(Exception):
    """Base class for all errors raised by this package."""


class InvalidStateError(LockdownOptError, ValueError):
    """A compartment state violates its invariants (non-finite, negative, ...)."""


class IntegrationBlowupError(LockdownOptError, RuntimeError):
    """A compartment left the admissible range during integration."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class GridMismatchError(LockdownOptError, ValueError):
    """Trajectory, schedule, and time grid do not share the same node count."""


class NonConvergenceError(LockdownOptError, RuntimeError):
    """The forward-backward sweep did not reach the requested tolerance.

    Carries the per-iteration sup-norm changes (``history``) and the last
    iterate packaged as a report (``report``) so the caller can inspect the
    terminal schedule or retry with a smaller relaxation factor.
    """

    def __init__(self, message: str, history: list[float], report=None):
        super().__init__(message)
        self.history = history
        self.report = report


class CalibrationError(LockdownOptError, ValueError):
    """A built-in calibration failed one of its internal consistency checks."""


class ConfigFormatError(LockdownOptError, ValueError):
    """A configuration file could not be parsed or is missing required keys."""
