"""Exception and warning types shared across the package."""


class MathieuError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MathieuError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(MathieuError, ValueError):
    """Inconsistent configuration (truncation orders, thresholds, grids)."""


class TruncationError(MathieuError, RuntimeError):
    """A series did not converge within its truncation cap.

    Carries the magnitude of the last term that was added so callers can
    judge how far from convergence the sum stopped.
    """

    def __init__(self, message: str, last_term: float = float("nan")):
        super().__init__(message)
        self.last_term = last_term


class PrecisionError(MathieuError, ArithmeticError):
    """A quantity left the range representable (or trustworthy) in doubles.

    Typical sources: series prefactors that overflow for large mode index,
    tunneling factors exp(-S*) that underflow, coefficient denominators
    below the double-precision trust floor.
    """


class SingularityError(MathieuError, ValueError):
    """Evaluation requested exactly at a singular point (e.g. at the source)."""


class CancellationWarning(UserWarning):
    """A series lost more than the allowed number of digits to cancellation."""


class TruncationWarning(UserWarning):
    """A truncation order is too small for the requested accuracy."""


class FallbackWarning(UserWarning):
    """An evaluation path failed and a fallback branch was used instead."""
