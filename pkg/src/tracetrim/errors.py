"""Exception hierarchy shared by all pipeline stages."""

from __future__ import annotations


class TraceError(Exception):
    """Base class for every error raised by tracetrim."""


class InvalidInputError(TraceError, ValueError):
    """Input violates an operation's precondition (empty sample set, bad config, ...)."""


class ParseError(InvalidInputError):
    """A log or tuple line could not be decoded.

    ``field`` names the offending field and ``lineno`` the 1-based line number
    (``None`` when the caller parsed a detached line).
    """

    def __init__(self, message: str, *, field: str, lineno: int | None = None, line: str | None = None):
        self.field = field
        self.lineno = lineno
        self.line = line
        where = f"line {lineno}" if lineno is not None else "line ?"
        super().__init__(f"{where}: field '{field}': {message}")


class InvalidComparisonError(InvalidInputError):
    """Two runs cannot be compared (they did not consume the same raw logs)."""


class ConsistencyError(TraceError):
    """An internal invariant was violated, e.g. a cycle between episodes."""


class StageError(TraceError):
    """A pipeline stage failed; ``stage`` names it and ``__cause__`` holds the original error."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        super().__init__(f"stage '{stage}' failed: {cause}")
