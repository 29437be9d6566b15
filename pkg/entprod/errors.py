"""
Exception types raised by the entprod library.

Library code raises; the command-line layer maps these onto exit codes and
error dictionaries.
"""


class ValidationError(ValueError):
    """An input violates a documented invariant."""

    def __init__(self, message: str, invariant: str | None = None):
        super().__init__(message)
        self.invariant = invariant


class NumericError(ArithmeticError):
    """The requested quantity is undefined for the given input."""


class ZeroTraceError(NumericError):
    def __init__(self, trace: complex):
        super().__init__(f"zero trace: |Tr A| = {abs(trace):.3e} is below the trace-class threshold")
        self.trace = trace


class ImpossibleOutcomeError(NumericError):
    def __init__(self, probability: float):
        super().__init__(f"measurement outcome has zero probability ({probability:.3e})")
        self.probability = probability


class OracleError(RuntimeError):
    """Brute-force oracle could not isolate a unique eigenstate; the case is skipped."""
