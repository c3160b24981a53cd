from typing import Optional


class KnotFitError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(KnotFitError, ValueError):
    """An input violates an operation's precondition."""


class ConfigError(DomainError):
    """A configuration object failed validation."""


class InfeasibleFitError(KnotFitError):
    """The least-squares system for a knot vector cannot be solved uniquely."""

    def __init__(self, message: str, rank: Optional[int] = None, unknowns: Optional[int] = None):
        super().__init__(message)
        self.rank = rank
        self.unknowns = unknowns


class InputFormatError(KnotFitError):
    """A point file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
