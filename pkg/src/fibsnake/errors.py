"""Exception and warning types raised across the package."""


class FibSnakeError(Exception):
    """Base class for all package errors."""


class FibIndexError(FibSnakeError, IndexError):
    pass


class DivergentBaseError(FibSnakeError, ValueError):
    """The scaling ratio is at or below the golden ratio, so the series diverge."""


class OutOfRangeError(FibSnakeError, ValueError):
    pass


class RegimeError(FibSnakeError, ValueError):
    """Parameters lie outside the regime where a construction is guaranteed."""


class BudgetError(FibSnakeError, ValueError):
    """A request would exceed an enumeration or memory cap."""


class NumericalInstabilityError(FibSnakeError, ArithmeticError):
    pass


class RegimeWarning(UserWarning):
    pass
