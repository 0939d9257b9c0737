"""Exception hierarchy shared by every phmaps module."""


class PharmonicError(Exception):
    """Base class for all errors raised by phmaps."""


class DimensionMismatchError(PharmonicError, ValueError):
    """Operands live in different numbers of variables or have incompatible shapes."""


class DomainError(PharmonicError, ValueError):
    """An argument lies outside the domain of an operation (odd m, p < 1, x = 0, ...)."""


class AdmissibilityError(PharmonicError):
    """A candidate h fails (h1) or (h2) where an admissible one is required."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ConstructionError(PharmonicError):
    """A construction produced a family that fails its exact identity check."""


class InvariantError(PharmonicError, AssertionError):
    """A proven implication failed to hold; indicates a bug, never user error."""


class UsageError(PharmonicError):
    """Invalid combination of command-line arguments."""
