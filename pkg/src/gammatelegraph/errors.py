"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class ConvergenceError(ArithmeticError):
    """A series hit its term cap before meeting the stopping rule."""

    def __init__(self, message, partial_sum, terms):
        super().__init__(f"{message} (partial sum {partial_sum!r} after {terms} terms)")
        self.partial_sum = partial_sum
        self.terms = terms


class QuadratureError(ArithmeticError):
    """Quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate, error):
        super().__init__(f"{message} (estimate {estimate!r}, error {error:.3g})")
        self.estimate = estimate
        self.error = error
