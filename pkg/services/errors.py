"""
Exception hierarchy for the Hadamard-space library.

Every error raised on purpose by the library derives from HadamardError so
callers (the CLI in particular) can map failures to exit codes without
catching unrelated exceptions.
"""

from typing import Optional, Sequence


class HadamardError(Exception):
    """Base class for all library errors."""


class DomainError(HadamardError, ValueError):
    """
    Raised when an argument lies outside the domain of an operation.

    Examples: t outside [0, 1], invalid probability weights, dimension
    mismatch, non positive-definite matrices, unknown tags or config keys.
    """

    def __init__(self, message: str, field: Optional[str] = None):
        """
        Args:
            message: Human readable description of the problem
            field: Name of the offending argument or config key, if known
        """
        self.field = field
        detailed_msg = message
        if field:
            detailed_msg = f"{message} (field: {field})"
        super().__init__(detailed_msg)


class NumericError(HadamardError, ArithmeticError):
    """Raised when a numerical routine fails (eigensolver, non-finite values, I/O of results)."""


class ConvergenceError(NumericError):
    """
    Raised when an iterative construction exhausts its round budget.

    The final diameter of the iterated tuple is kept so the caller can judge
    how far from convergence the run ended.
    """

    def __init__(self, message: str, final_diameter: float, rounds: int, tolerance: Optional[float] = None):
        self.final_diameter = final_diameter
        self.rounds = rounds
        self.tolerance = tolerance

        detailed_msg = message
        detailed_msg += f"\nRounds used: {rounds}"
        detailed_msg += f"\nFinal diameter: {final_diameter:.6g}"
        if tolerance is not None:
            detailed_msg += f"\nRequested tolerance: {tolerance:.3g}"

        super().__init__(detailed_msg)


class CapacityError(HadamardError):
    """Raised when an input exceeds what an exponential-cost construction accepts."""

    def __init__(self, message: str, requested: int, capacity: int):
        self.requested = requested
        self.capacity = capacity
        super().__init__(f"{message} (requested {requested}, capacity {capacity})")


class CheckFailedError(HadamardError):
    """
    Raised when a property suite or a bound check does not pass.

    Carries the names of the failed items so a report can be printed without
    re-running the check.
    """

    def __init__(self, message: str, failed_items: Optional[Sequence[str]] = None):
        self.failed_items = list(failed_items or [])

        detailed_msg = message
        if self.failed_items:
            detailed_msg += f"\n\nFailed: {', '.join(self.failed_items)}"

        super().__init__(detailed_msg)
