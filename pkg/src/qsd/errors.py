"""Exception types shared across the package."""


class NonInvertibleError(ArithmeticError):
    """Raised for zero divisors such as 0 and 1 +/- iq."""


class NotInSubalgebraError(ValueError):
    """A multivector or matrix has components outside span{1, i, q, iq}."""


class EvaluationError(ArithmeticError):
    """A function evaluation produced NaN or infinity."""

    def __init__(self, message, reason="nan-inf"):
        super().__init__(message)
        self.reason = reason


class UndefinedReferenceError(ArithmeticError):
    """The reference derivative is zero, infinite or cannot be evaluated."""
