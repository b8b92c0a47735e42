"""Exception hierarchy shared by every module."""

from __future__ import annotations


class WcgError(Exception):
    """Base class for all errors raised by this package."""


class InvalidReferenceError(WcgError, LookupError):
    """A player, resource, strategy or profile index does not exist."""


class DomainError(WcgError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapacityError(WcgError):
    """An enumeration would exceed its configured cap."""

    def __init__(self, message: str, size: int | None = None, cap: int | None = None):
        super().__init__(message)
        self.size = size
        self.cap = cap


class NumericError(WcgError, ArithmeticError):
    """A floating point search failed to converge."""


class InvariantViolation(WcgError, AssertionError):
    """A property guaranteed by theory was observed to fail."""


class GeneratorError(WcgError, ValueError):
    """Requested generator parameters cannot be realised."""


class InfeasiblePlayerError(WcgError, ValueError):
    """A network player has no source-target path."""


class ParseError(WcgError, ValueError):
    """An instance document is malformed.

    Attributes:
        line: 1-based line number of the offending line, if known.
        field: name of the field that failed validation, if known.
    """

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field
