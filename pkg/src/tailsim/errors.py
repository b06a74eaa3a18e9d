"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class InternalError(RuntimeError):
    """An internal invariant was violated (a bug, or inputs far outside scope)."""


class UndefinedRelativeError(ArithmeticError):
    """Relative simulation error requested for a non-positive mean."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, *, estimate=None, error=None, intervals=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.intervals = intervals
