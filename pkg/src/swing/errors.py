"""Exception types shared across the package."""

from __future__ import annotations


class SwingError(Exception):
    """Base class for all package-specific errors."""


class BackendUnavailable(SwingError):
    """The scoring backend could not be reached after the retry budget."""


class MalformedResponse(SwingError):
    """The scoring backend returned a payload that violates the protocol."""


class CacheMiss(SwingError):
    """A cache-only backend was asked for a pair it does not hold."""


class ParseError(SwingError):
    """A line of an input file could not be parsed or validated.

    Carries the 1-based line number when the failure is tied to a line.
    """

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class EmptyRefs(SwingError):
    """Alignment was requested with no reference sentences."""


class EmptyGens(SwingError):
    """Alignment was requested with no generated sentences."""


class DimensionMismatch(SwingError):
    """A link matrix does not match the sentence lists it claims to map."""


class SkippedRecord(SwingError):
    """A record cannot be processed; carries the reason for the skip."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason
