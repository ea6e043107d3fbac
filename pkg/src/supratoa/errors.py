"""Exception types shared across the package."""


class SupratoaError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(SupratoaError):
    """A config file or config value could not be parsed."""


class NotAccessible(SupratoaError):
    """The classical trajectory does not reach the arrival point."""


class ZeroMomentum(SupratoaError):
    """A phase point with p = 0 was used where 1/p is required."""


class QuadratureFailure(SupratoaError):
    """Adaptive quadrature could not meet the requested tolerance."""


class ArgumentTooNegative(SupratoaError):
    """0F1 argument is in the catastrophic-cancellation regime."""


class NoConvergence(SupratoaError):
    """A series evaluation failed to converge within the term budget."""


class GradeError(SupratoaError):
    """An operation received a series with hbar grades it cannot accept."""


class ZeroOverlap(SupratoaError):
    """Two test functions have (numerically) vanishing overlap."""
