"""
Custom exceptions for the separation toolkit.
These exceptions represent domain-specific errors and are part of the core numerical logic.
"""

from typing import List, Optional


class MdiIcaError(Exception):
    """Base exception for separation toolkit errors."""

    def __init__(self, message: str, details: Optional[str] = None):
        self.message = message
        self.details = details
        super().__init__(message)


class InvalidDataError(MdiIcaError, ValueError):
    """Raised when a data matrix violates its structural invariants."""
    pass


class EmptyInputError(InvalidDataError):
    """Raised when an operation receives no samples."""

    def __init__(self, what: str = "samples"):
        self.what = what
        super().__init__(f"No {what} provided")


class RankDeficientError(MdiIcaError):
    """Raised when a covariance or Gram matrix is numerically singular."""

    def __init__(self, smallest: float, largest: float, context: str = "covariance"):
        self.smallest = smallest
        self.largest = largest
        self.context = context
        message = (
            f"Rank-deficient {context}: smallest eigenvalue {smallest:.3e} "
            f"is below 1e-10 x largest ({largest:.3e})"
        )
        super().__init__(message, "degenerate or duplicated channels")


class DimensionMismatchError(MdiIcaError, ValueError):
    """Raised when array shapes are inconsistent."""

    def __init__(self, what: str, expected, actual):
        self.what = what
        self.expected = expected
        self.actual = actual
        super().__init__(f"Dimension mismatch for {what}: expected {expected}, got {actual}")


class InvalidRangeError(MdiIcaError, ValueError):
    """Raised when a grid range or grid size is invalid."""
    pass


class SingularDesignError(MdiIcaError):
    """Raised when the weighted least squares normal matrix cannot be solved."""

    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(
            f"Normal equations are numerically singular (condition estimate {condition:.3e})"
        )


class NotWhitenedError(MdiIcaError):
    """Raised when a solver receives data whose covariance is far from identity."""

    def __init__(self, deviation: float, tolerance: float):
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(
            f"Input is not whitened: max |cov - I| = {deviation:.3f} exceeds {tolerance}"
        )


class SingularMatrixError(MdiIcaError):
    """Raised when a matrix that must be inverted is singular."""
    pass


class UnknownDistributionError(MdiIcaError):
    """Raised when a source distribution family is not registered."""

    def __init__(self, name: str, supported: Optional[List[str]] = None):
        self.name = name
        self.supported = supported
        message = f"Distribution '{name}' is not supported"
        if supported:
            message += f". Supported distributions: {', '.join(supported)}"
        super().__init__(message)


class UnknownMethodError(MdiIcaError):
    """Raised when a separation method id is not registered."""

    def __init__(self, name: str, supported: Optional[List[str]] = None):
        self.name = name
        self.supported = supported
        message = f"Method '{name}' is not supported"
        if supported:
            message += f". Supported methods: {', '.join(supported)}"
        super().__init__(message)


class UnknownBasisError(MdiIcaError):
    """Raised when a basis name is not registered."""

    def __init__(self, name: str, supported: Optional[List[str]] = None):
        self.name = name
        self.supported = supported
        message = f"Basis '{name}' is not supported"
        if supported:
            message += f". Supported bases: {', '.join(supported)}"
        super().__init__(message)


class ConfigurationError(MdiIcaError):
    """Raised when solver or study configuration is invalid."""

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        self.reason = message
        super().__init__(f"{pointer}: {message}" if pointer else message)


class InputFormatError(MdiIcaError):
    """Raised when an input matrix file cannot be parsed."""

    def __init__(self, path: str, reason: str, line: Optional[int] = None):
        self.path = path
        self.line = line
        self.reason = reason
        location = f"{path}:{line}" if line is not None else path
        super().__init__(f"{location}: {reason}")


class ArtifactError(MdiIcaError):
    """Raised when reading or writing an artifact file fails."""

    def __init__(self, message: str, source_error: Optional[Exception] = None):
        self.source_error = source_error
        details = str(source_error) if source_error else None
        super().__init__(message, details)
