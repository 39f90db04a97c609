"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class QuadratureError(ArithmeticError):
    """Adaptive integration ran out of subdivisions before meeting its tolerance.

    The best available estimate and its error bound are kept on the exception.
    """

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SamplingError(RuntimeError):
    """A sampler exhausted its proposal or retry budget."""
