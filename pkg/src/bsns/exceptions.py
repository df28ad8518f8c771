"""Exceptions for bsns half-space solves and verification runs."""

from dataclasses import dataclass, field
from typing import Any


class SolverError(Exception):
    """Base exception for all solver errors."""

    pass


@dataclass
class InvalidParameterError(SolverError):
    """A parameter lies outside the domain of an operation.

    Raised when:
    - A Bessel order is <= -1, a Gamma argument is a pole, or a kernel is asked for t = 0
    - Grid sizes or exponents are not admissible
    - A configuration document carries unknown keys
    """

    message: str

    def __str__(self) -> str:
        return self.message


@dataclass
class GridMismatchError(InvalidParameterError):
    """Fields or grids that must agree do not.

    Attributes:
        message: Description of the error.
        expected: Expected shape or parameter, when known.
        actual: Actual shape or parameter, when known.
    """

    expected: Any = None
    actual: Any = None

    def __str__(self) -> str:
        if self.expected is None and self.actual is None:
            return self.message
        return f"{self.message} (expected: {self.expected}, got: {self.actual})"


@dataclass
class InsufficientResolutionError(InvalidParameterError):
    """Too few radial layers near the boundary for a finite-difference diagnostic.

    Attributes:
        message: Description of the error.
        layers: Number of layers found below the cutoff.
        required: Number of layers required.
    """

    layers: int = 0
    required: int = 0

    def __str__(self) -> str:
        return f"{self.message} (layers: {self.layers}, required: {self.required})"


@dataclass
class NumericalFailureError(SolverError):
    """A computation produced non-finite values or diverged past its ceiling."""

    message: str

    def __str__(self) -> str:
        return self.message


@dataclass
class NonConvergenceError(SolverError):
    """An iteration exhausted its budget before reaching the tolerance.

    Attributes:
        message: Description of the error.
        iterations: Number of iterations performed.
        residual: Last fixed-point residual.
        tolerance: The requested tolerance.
        diagnostics: Diagnostics collected up to the failure.
    """

    message: str
    iterations: int
    residual: float
    tolerance: float
    diagnostics: Any = field(default=None, repr=False)

    def __str__(self) -> str:
        return (
            f"{self.message} (iterations: {self.iterations}, residual: {self.residual:.3e}, "
            f"tolerance: {self.tolerance:.3e})"
        )
