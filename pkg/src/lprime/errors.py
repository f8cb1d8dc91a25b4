"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class LPrimeError(Exception):
    """Base class for all package errors."""


class DomainError(LPrimeError, ValueError):
    """An argument lies outside the domain of the operation."""


class PoleError(DomainError):
    """Evaluation requested at a pole."""


class AccuracyError(LPrimeError, ArithmeticError):
    """Requested accuracy could not be reached.

    ``achieved`` carries the best error estimate obtained; ``estimates``
    optionally carries the last iterates (e.g. quadrature sums).
    """

    def __init__(self, message: str, achieved: float = float("nan"), estimates=()):
        super().__init__(message)
        self.achieved = achieved
        self.estimates = tuple(estimates)


class PathThroughZero(LPrimeError, ArithmeticError):
    """A tracked function (numerically) vanishes on the path being followed."""

    def __init__(self, message: str, point: complex):
        super().__init__(message)
        self.point = point


class ScanIncomplete(LPrimeError):
    """A statistic was requested beyond the verified height of a scan."""

    def __init__(self, message: str, missing=()):
        super().__init__(message)
        self.missing = list(missing)


class StoreError(LPrimeError, OSError):
    """Persistent zero store is unusable (corrupt, mismatched, locked)."""


class ConfigMismatch(StoreError):
    """Resumption attempted with a configuration different from the stored one."""


class StoreCorrupted(StoreError):
    """A committed JSONL record failed to parse or validate."""
