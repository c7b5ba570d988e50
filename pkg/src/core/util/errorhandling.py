"""
Error handling utilities for the command-line front end.
Maps toolkit exceptions to exit codes and user-facing messages in one place.
"""

from enum import IntEnum
from typing import Dict, Tuple, Type

from ..ports.exceptions import (
    ArtifactError,
    ConfigurationError,
    DimensionMismatchError,
    InputFormatError,
    InvalidDataError,
    MdiIcaError,
    NotWhitenedError,
    RankDeficientError,
    SingularDesignError,
    SingularMatrixError,
    UnknownBasisError,
    UnknownDistributionError,
    UnknownMethodError,
)
from ..ports.logger import Logger


class ExitCode(IntEnum):
    SUCCESS = 0
    INPUT_ERROR = 1
    NOT_CONVERGED = 2


# Checked in order; the first matching class wins
ERROR_TABLE: Dict[Type[BaseException], Tuple[ExitCode, str]] = {
    InputFormatError: (ExitCode.INPUT_ERROR, "Malformed input"),
    ConfigurationError: (ExitCode.INPUT_ERROR, "Invalid configuration"),
    UnknownMethodError: (ExitCode.INPUT_ERROR, "Unknown method"),
    UnknownBasisError: (ExitCode.INPUT_ERROR, "Unknown basis"),
    UnknownDistributionError: (ExitCode.INPUT_ERROR, "Unknown distribution"),
    RankDeficientError: (ExitCode.INPUT_ERROR, "Rank-deficient data"),
    InvalidDataError: (ExitCode.INPUT_ERROR, "Invalid data"),
    DimensionMismatchError: (ExitCode.INPUT_ERROR, "Dimension mismatch"),
    NotWhitenedError: (ExitCode.INPUT_ERROR, "Data not whitened"),
    SingularDesignError: (ExitCode.INPUT_ERROR, "Density fit failed"),
    SingularMatrixError: (ExitCode.INPUT_ERROR, "Singular matrix"),
    ArtifactError: (ExitCode.INPUT_ERROR, "Output error"),
    MdiIcaError: (ExitCode.INPUT_ERROR, "Separation error"),
}


def classify(exc: BaseException) -> Tuple[ExitCode, str]:
    """Exit code and label for an exception; unknown errors map to exit 1."""
    for error_type, outcome in ERROR_TABLE.items():
        if isinstance(exc, error_type):
            return outcome
    return ExitCode.INPUT_ERROR, f"Unexpected error ({exc.__class__.__name__})"


def format_error(exc: BaseException) -> str:
    """One-line message for standard error."""
    _, label = classify(exc)
    message = exc.message if isinstance(exc, MdiIcaError) else str(exc)
    details = exc.details if isinstance(exc, MdiIcaError) else None
    return f"{label}: {message}" + (f" ({details})" if details else "")


def handle_error(exc: BaseException, logger: Logger) -> int:
    """
    Log an exception and return the exit code the process should use.

    Args:
        exc: The exception raised by a command
        logger: Logger receiving the error line

    Returns:
        Exit code from the error table
    """
    code, _ = classify(exc)
    logger.error(format_error(exc), error=exc.__class__.__name__, exit_code=int(code))
    return int(code)
