"""Exception types raised by the library."""


class KerrNoiseError(Exception):
    """Base class for all library errors."""


class DomainError(KerrNoiseError, ValueError):
    """An input lies outside the domain of a formula."""


class ConvergenceError(KerrNoiseError, RuntimeError):
    """An iterative solver ran out of iterations."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class QuadratureError(KerrNoiseError, RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved
