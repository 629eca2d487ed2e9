"""Exception hierarchy shared across the package.

Each class carries the process exit code the command-line front end maps it to.
"""

from __future__ import annotations


class OUCPError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InfeasibleError(OUCPError, ValueError):
    """The requested configuration admits no valid segmentation."""

    exit_code = 2

    def __init__(self, message: str, required_n: int | None = None):
        super().__init__(message)
        self.required_n = required_n


class DataError(OUCPError, ValueError):
    """Input data could not be parsed or violates a precondition."""

    exit_code = 3


class SingularStatisticsError(OUCPError, ArithmeticError):
    """A segment's Q matrix is not positive definite, so no MLE exists."""

    exit_code = 4

    def __init__(self, start: int, stop: int, message: str | None = None):
        self.start = start
        self.stop = stop
        super().__init__(
            message
            or f"segment rows [{start}, {stop}) have singular statistics; "
            "the drift MLE is undefined"
        )


class OracleCapError(OUCPError, ValueError):
    """Exhaustive search refused because the instance exceeds the size cap."""

    exit_code = 2


class MonteCarloError(OUCPError):
    """Too many Monte-Carlo iterations failed for the summary to be trusted."""

    exit_code = 4
