"""Exception hierarchy shared by all modules."""


class PrimordialQGError(Exception):
    """Base class for every error raised by the package."""


class DomainError(PrimordialQGError, ValueError):
    """An argument lies outside the domain of the function."""


class UnsupportedDimension(PrimordialQGError, ValueError):
    pass


class DimensionMismatch(PrimordialQGError, TypeError):
    pass


class NumericalError(PrimordialQGError, ArithmeticError):
    """A numerical procedure failed to produce a trustworthy result."""


class NonConvergent(NumericalError):
    pass


class NonFiniteEvaluation(NumericalError):
    pass


class StabilityError(NumericalError):
    pass


class GridResolutionError(PrimordialQGError, ValueError):
    pass


class NonCommensurateShift(PrimordialQGError, ValueError):
    pass


class InsufficientData(PrimordialQGError, ValueError):
    pass


class InsufficientGrid(PrimordialQGError, ValueError):
    pass


class MissingInitialSpread(PrimordialQGError, ValueError):
    pass


class RelativisticRegime(PrimordialQGError, ValueError):
    pass


class InvalidState(PrimordialQGError, ValueError):
    """A density matrix or wavefunction violates its invariants."""
