"""Exception hierarchy shared by every module of the package."""
from __future__ import annotations


class SnfmomError(Exception):
    """Base class for all package errors."""


class DivisionFailure(SnfmomError, ArithmeticError):
    """Exact division has no solution in the ring."""


class LaurentEscape(SnfmomError, ArithmeticError):
    """A negative power could not be resolved during substitution."""


class MultivariateInput(SnfmomError, ValueError):
    """A univariate-only routine received more than one variable."""


class ParseError(SnfmomError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DimensionMismatch(SnfmomError, ValueError):
    pass


class NoRingFactorization(SnfmomError):
    """LDU elimination needed a quotient that does not exist in the ring."""

    def __init__(self, message: str, position: tuple[int, int]):
        super().__init__(message)
        self.position = position


class NotAPermutation(SnfmomError, ValueError):
    pass


class BudgetExceeded(SnfmomError):
    """A configured enumeration or minor-count budget was exhausted."""


class Mismatch(SnfmomError):
    """A verified identity failed; ``witness`` locates the first difference."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NonzeroB(SnfmomError, ValueError):
    pass


class NotMonic(SnfmomError, ValueError):
    pass


class DegreeMismatch(SnfmomError, ValueError):
    pass


class NotMonicWeights(SnfmomError, ValueError):
    pass


class InvalidAnchor(SnfmomError, ValueError):
    pass


class NotLinearExtension(SnfmomError, ValueError):
    pass


class NotNoncrossing(SnfmomError, ValueError):
    pass


class NoClosedForm(SnfmomError, LookupError):
    pass
