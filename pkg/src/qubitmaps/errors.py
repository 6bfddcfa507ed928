"""Exception types raised across the package."""


class QubitMapsError(Exception):
    """Base class for all package errors."""


class DomainError(QubitMapsError, ValueError):
    """An argument lies outside the domain of the requested function."""


class UnrepresentableValueError(QubitMapsError, ValueError):
    """The requested quantity is infinite (e.g. D(0) for a sub-ohmic bath)."""


class SubOhmicDivergenceError(QubitMapsError, ValueError):
    """A shift integral or kernel diverges because D(0) is infinite."""


class QuadratureError(QubitMapsError, RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, panels=None, estimate=None, error=None):
        super().__init__(message)
        self.panels = panels
        self.estimate = estimate
        self.error = error


class PoleCollisionError(QubitMapsError, ValueError):
    """Two principal-value poles (or a pole and an endpoint) are too close."""


class RankDeficiencyError(QubitMapsError, ArithmeticError):
    """The steady-state linear system has no unique solution."""


class BracketError(QubitMapsError, ValueError):
    """A root-search bracket does not enclose a sign change."""


class NoCrossingError(BracketError):
    """The population never becomes negative: the map stays physical."""


class InsufficientDecayError(QubitMapsError, ValueError):
    """A trajectory does not decay enough for a rate to be fitted."""


class InconsistentLimitsError(QubitMapsError, ValueError):
    """Shift-integral limits violate 2*Delta = Delta_plus - Delta_minus."""
