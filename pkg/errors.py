"""
Free Convolution Errors - exception types shared by every module

Each class carries the CLI exit code it maps onto.
"""

from typing import Optional


class FreeConvError(Exception):
    """Base class for every error raised by this library."""

    exit_code = 2


class MeasureError(FreeConvError):
    """Invalid atoms, weights or measure documents."""


class SeriesError(FreeConvError):
    """Non-invertible series, index out of range or refused enumeration."""


class DomainError(FreeConvError):
    """Argument outside the domain of an operation."""


class NumericalError(FreeConvError):
    """Floating-point routine failed to converge."""

    exit_code = 3


class EigenSolverError(NumericalError):
    """Dense eigensolver failure."""


class QuadratureError(NumericalError):
    """Refinement budget exhausted before reaching the tolerance."""

    def __init__(self, message: str, estimate: Optional[object] = None, gap: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate
        self.gap = gap


class VerificationFailure(FreeConvError):
    """One or more verification checks failed."""

    exit_code = 1
