"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations

from pathlib import Path
from typing import Any

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


class GcaError(Exception):
    """Base class; `exit_code` is what the CLI returns when this escapes a command."""

    exit_code = EXIT_DATA

    def to_dict(self) -> dict[str, Any]:
        return {"error": type(self).__name__, "message": str(self)}


class ParseError(GcaError, ValueError):
    """A record in an input file could not be parsed."""

    def __init__(self, message: str, path: str | Path | None = None, line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        location = ""
        if self.path is not None:
            location = f"{self.path}:{line}: " if line is not None else f"{self.path}: "
        super().__init__(f"{location}{message}")

    def to_dict(self) -> dict[str, Any]:
        payload = super().to_dict()
        payload.update({"path": self.path, "line": self.line})
        return payload


class ValidationError(GcaError, ValueError):
    """Input parsed fine but violates a data invariant."""


class DataError(GcaError):
    """An input file could not be opened or decoded."""

    def __init__(self, message: str, path: str | Path | None = None):
        self.path = str(path) if path is not None else None
        super().__init__(f"{self.path}: {message}" if self.path is not None else message)

    def to_dict(self) -> dict[str, Any]:
        payload = super().to_dict()
        payload["path"] = self.path
        return payload


class ConfigurationError(GcaError, ValueError):
    """Invalid shapes, weights or flags."""

    exit_code = EXIT_USAGE


class UsageError(ConfigurationError):
    """The command line itself is malformed: unknown flag, missing argument."""


class DegenerateInputError(GcaError, ValueError):
    """The input is well-formed but too small or too uniform for the operation."""


class NumericalError(GcaError, ArithmeticError):
    """A non-finite value appeared during evaluation."""

    exit_code = EXIT_NUMERICAL

    def __init__(
        self, message: str, location: str | int | None = None, iteration: int | None = None
    ):
        self.location = location
        self.iteration = iteration
        super().__init__(message)

    def to_dict(self) -> dict[str, Any]:
        payload = super().to_dict()
        payload.update({"location": self.location, "iteration": self.iteration})
        return payload
