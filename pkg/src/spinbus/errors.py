"""Exception types shared across the package."""


class SpinbusError(Exception):
    """Base class for all package errors."""


class DomainError(SpinbusError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class CapacityError(SpinbusError, MemoryError):
    """The requested problem is larger than the configured desk-scale cap."""


class ConvergenceError(SpinbusError, RuntimeError):
    """An iterative solver stopped before reaching the requested residual.

    Attributes
    ----------
    residual : float
        Largest eigenpair residual reached before giving up.
    """

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class RegimeError(DomainError):
    """A closed-form expression was evaluated outside its regime of validity."""
