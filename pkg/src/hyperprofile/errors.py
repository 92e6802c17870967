"""Exception types shared across the package."""

from __future__ import annotations


class HyperprofileError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(HyperprofileError, ValueError):
    """An input violates a documented precondition or invariant."""


class DataFormatError(ValidationError):
    """A file does not conform to its documented schema.

    Carries the offending path and 1-based line number when known so CLI
    diagnostics can point at the exact row.
    """

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        location = ""
        if path is not None:
            location = f"{path}: "
        if line is not None:
            location = f"{location}line {line}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line
