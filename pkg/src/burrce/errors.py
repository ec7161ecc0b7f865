"""Exception and warning types raised by :mod:`burrce`."""
from __future__ import annotations


class BurrError(ValueError):
    """Base class for invalid inputs and degenerate estimation problems."""


class InvalidParameters(BurrError):
    pass


class DomainError(BurrError):
    pass


class SingularDensity(BurrError):
    """Density is unbounded at the origin (``x == 0`` with ``c < 1``)."""


class MomentUndefined(BurrError):
    pass


class NoExactObservations(BurrError):
    """Every observation is censored, so the MLE degenerates to ``k -> 0``."""


class AllInfeasible(BurrError):
    pass


class NoRoot(BurrError):
    pass


class DegenerateSpec(BurrError):
    pass


class UnsupportedFormat(BurrError):
    pass


class EmptySample(BurrError):
    pass


class SampleTooSmall(BurrError):
    pass


class SpecError(BurrError):
    """Benchmark spec document failed validation.

    ``pointer`` is the JSON pointer of the offending field.
    """

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        self.message = message
        super().__init__(f"{pointer or '/'}: {message}")


class WingoWarning(UserWarning):
    """No observation lies below one; the Burr XII MLE may not exist."""
