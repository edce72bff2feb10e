from typing import Optional


class SkelregError(Exception):
    """Base class for all errors raised by skelreg."""


class ConfigError(SkelregError):
    """A configuration value is out of range or inconsistent with the data."""


class DegenerateError(SkelregError):
    """The data or the skeleton is too degenerate for the requested operation."""


class ShapeError(SkelregError, ValueError):
    """Array shapes or values do not match what the operation expects."""


class NoSupportError(SkelregError):
    """No training point has a finite distance (or nonzero weight) to the query."""


class ConvergenceError(SkelregError):
    def __init__(self, message: str, gap: float, iterations: Optional[int] = None):
        super().__init__(message)
        self.gap = gap
        self.iterations = iterations
