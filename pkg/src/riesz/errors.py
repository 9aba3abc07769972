"""Exception types shared across the package.

Each error maps onto a CLI exit code, see ``riesz.cli``.
"""


class RieszError(Exception):
    """Base class for all package errors."""


class UnsupportedSpaceError(RieszError, ValueError):
    """Operation not available for the requested space (e.g. OP points)."""


class DomainError(RieszError, ValueError):
    """Input outside the mathematical domain of an operation."""


class DivergentEnergyError(RieszError, ArithmeticError):
    """Kernel is not integrable against the uniform measure."""


class QuadratureError(RieszError, ArithmeticError):
    """Quadrature failed to reach the requested tolerance.

    The last estimate and its error are kept on the exception.
    """

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class BracketError(RieszError):
    """Statistic has the same sign at both ends of a bisection bracket."""

    def __init__(self, message, lo_value=None, hi_value=None):
        super().__init__(message)
        self.lo_value = lo_value
        self.hi_value = hi_value


class SamplingError(RieszError):
    """Sampler cannot produce points (e.g. a cap of vanishing mass)."""


class ResourceError(RieszError):
    """Request exceeds a configured size guard."""


class DegenerateStartError(RieszError):
    """Every optimizer restart failed its first line search."""
