"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class ResourceCapError(RuntimeError):
    """A computation would exceed a configured resource cap."""

    def __init__(self, message, predicted=None, cap=None):
        super().__init__(message)
        self.predicted = predicted
        self.cap = cap


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its tolerance before the refinement cap."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
