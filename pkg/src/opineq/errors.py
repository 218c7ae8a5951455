class OpineqError(Exception):
    """Base class for all errors raised by opineq."""


class ShapeError(OpineqError, ValueError):
    pass


class DomainError(OpineqError, ValueError):
    """An eigenvalue lies outside the admissible domain of a matrix function."""


class NumericFailure(OpineqError, ArithmeticError):
    """An iterative kernel did not converge."""


class SingularError(OpineqError, ArithmeticError):
    """A matrix that must be strictly positive (or invertible) is numerically singular."""


class PreconditionError(OpineqError, ValueError):
    pass


class DominanceError(OpineqError):
    """Eigenvalue dominance required for a unitary witness does not hold."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SearchExhausted(OpineqError):
    """A counterexample search finished without reaching its target."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
