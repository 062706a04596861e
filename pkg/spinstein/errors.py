"""
Error types shared by every spinstein module.

Each error carries the process exit code the CLI should return and a human readable
detail message, so the command-line layer can translate failures in one place.
"""
from typing import Optional


class SpinsteinError(Exception):
    """Base error with an exit code and a detail message."""

    exit_code = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code

    def __str__(self) -> str:
        return self.detail


class UsageError(SpinsteinError, ValueError):
    """Invalid arguments or a violated precondition."""

    exit_code = 2


class DomainError(SpinsteinError, ValueError):
    """A mathematical condition required by a bound does not hold."""

    exit_code = 2


class ResourceError(SpinsteinError):
    """A state space is too large for the requested exact computation."""

    exit_code = 3

    def __init__(self, detail: str, size: Optional[int] = None):
        super().__init__(detail)
        self.size = size


class OutputError(SpinsteinError):
    """Writing an output file failed."""

    exit_code = 4


class SolverError(SpinsteinError):
    """An internal numerical solver did not reach its tolerance."""

    exit_code = 1
