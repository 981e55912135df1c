"""
Exception hierarchy for the NRP toolkit.

Input-like errors also derive from ValueError so callers that only know about
ValueError keep working.
"""

from __future__ import annotations

from typing import Optional


class NRPError(Exception):
    """Base class for every error raised by this package."""


class InputError(NRPError, ValueError):
    """Invalid ids, mismatched sizes, bad parameters."""


class CapacityError(NRPError):
    """Exhaustive enumeration requested above the configured cap."""


class PreconditionError(NRPError, ValueError):
    """An operation's precondition on the instance does not hold."""


class ConfigError(NRPError, ValueError):
    """Generator config, experiment manifest or environment is invalid."""


class ReductionError(NRPError):
    """
    The customers fixed to 1 cannot be implemented together within the budget.

    Attributes:
        cost: Union closure cost of the fixed-in customers
        bound: Budget bound they were checked against
    """

    def __init__(self, message: str, cost: int, bound: int) -> None:
        super().__init__(message)
        self.cost = cost
        self.bound = bound


class InstanceFormatError(InputError):
    """Malformed instance or config text. `line` is 1-based, None for EOF."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        where = f"line {line}" if line is not None else "end of input"
        super().__init__(f"{where}: {message}")


class InstanceSyntaxError(InstanceFormatError):
    pass


class DuplicateIdError(InstanceFormatError):
    pass


class DanglingReferenceError(InstanceFormatError):
    pass


class CycleError(InstanceFormatError):
    pass
