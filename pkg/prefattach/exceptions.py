from __future__ import annotations

from typing import Any


class PrefAttachException(ValueError):  # noqa: N818
    """Base exception of all prefattach related errors."""


class ParseError(PrefAttachException):
    """Indicates a malformed row, an unparseable date or an unknown citing article in the input.

    Args:
        message (str): Human readable description of the problem.
        line (int | None): The 1-based line number within the offending file.
        source (str | None): A name for the offending file (e.g. ``nodes`` or ``edges``).
    """

    def __init__(self, message: str, line: int | None = None, source: str | None = None) -> None:
        self.line = line
        self.source = source
        location = ""
        if source is not None:
            location += f"{source}"
        if line is not None:
            location += f" line {line}" if location else f"line {line}"
        super().__init__(f"{location}: {message}" if location else message)


class ConfigurationError(PrefAttachException):
    """Indicates an invalid resolution, model configuration or analysis option."""


class ShapeError(PrefAttachException):
    """An estimator was applied to a growth sequence of the wrong shape."""


class StepOutOfRange(PrefAttachException):
    """The requested time-step does not exist in the growth sequence."""


class DomainError(PrefAttachException):
    """A function was evaluated outside of its domain."""


class FitError(PrefAttachException):
    """Indicates insufficient or degenerate data for a fit."""


class ConvergenceError(FitError):
    """The optimizer failed to converge.

    The optimizer's diagnostics are available through :attr:`diagnostics`.
    """

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None) -> None:
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class MismatchedSupport(FitError):
    """The fits to compare were not performed on a common support or on identical data."""
