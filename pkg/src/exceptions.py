"""Custom exceptions for tmtool.

Standardized exception hierarchy; every exception maps to a process exit code.
"""

from typing import Any


class TmtoolException(Exception):
    """Base exception for tmtool."""

    exit_code: int = 1
    detail: str = "Internal error"

    def __init__(self, message: str | None = None, **kwargs: Any):
        self.message = message or self.detail
        self.extra = kwargs
        super().__init__(self.message)


# Input Errors


class InputError(TmtoolException):
    """Input could not be interpreted."""

    detail = "Invalid input"


class MalformedStructureError(InputError):
    """Structure file does not match its schema."""

    detail = "Malformed structure file"


class UnknownBasisError(InputError):
    """A term names a basis element the structure does not declare."""

    detail = "Unknown basis name"


class DimensionMismatchError(InputError):
    """Operands live over bases of different dimension."""

    detail = "Dimension mismatch"


class DegreeError(InputError):
    """Operand has the wrong degree or is not homogeneous."""

    detail = "Degree error"


class DimensionLimitError(InputError):
    """Dimension exceeds the configured cap."""

    detail = "Dimension exceeds the configured limit"


# Precondition Refusals


class TwistedConditionError(TmtoolException):
    """Operation requires a twisted Poisson structure."""

    detail = "Twisted condition fails"


class NotUnimodularError(TmtoolException):
    """Operation requires a vanishing modular class."""

    detail = "Structure is not unimodular"


class NotACocycleError(TmtoolException):
    """Element is not closed under the differential."""

    detail = "Not a cocycle"


class NotAComplexError(TmtoolException):
    """Differential does not square to zero."""

    detail = "Differential does not square to zero"


class GaugeNotInvertibleError(TmtoolException):
    """Gauge map is not invertible over the polynomial ring."""

    detail = "Gauge not invertible over polynomial ring"
