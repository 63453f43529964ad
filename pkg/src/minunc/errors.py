"""Exception types raised across the package."""


class MinUncError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(MinUncError, ValueError):
    pass


class NonHermitian(MinUncError, ValueError):
    pass


class NotADensityMatrix(MinUncError, ValueError):
    pass


class FactorizationError(MinUncError, RuntimeError):
    pass


class EigenFailure(MinUncError, RuntimeError):
    pass


class ZeroVariance(MinUncError, ValueError):
    pass


class InvalidM(MinUncError, ValueError):
    pass


class GridTooCoarse(MinUncError, RuntimeError):
    pass


class DomainError(MinUncError, ValueError):
    pass


class NoConvergence(MinUncError, RuntimeError):
    pass


class NoProgress(MinUncError, RuntimeError):
    pass


class ParseError(MinUncError, ValueError):
    pass
