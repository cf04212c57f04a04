"""Exception types shared across the package."""


class StrobeError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(StrobeError, ValueError):
    """A parameter violates its contract (non-unit axis, bad angle, ...)."""


class NumericalInstabilityError(StrobeError, ArithmeticError):
    """An iterate left the sanity window and cannot be safely renormalized."""


class IntegrationError(NumericalInstabilityError):
    """The ODE state became non-finite.

    ``last_theta`` is the last parameter value at which the state was finite.
    """

    def __init__(self, message, last_theta):
        super().__init__(f"{message} (last good theta = {last_theta!r})")
        self.last_theta = last_theta


class OutOfRangeError(StrobeError, IndexError):
    """A Q-sequence was asked for an index it does not define."""


class UnsupportedInputError(StrobeError, TypeError):
    """Input type is not accepted by an exact-arithmetic operation."""
