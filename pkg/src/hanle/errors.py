"""Exception types raised across the package."""


class HanleError(Exception):
    """Base class for all package errors."""


class DomainError(HanleError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularSystemError(HanleError, ArithmeticError):
    """A steady-state linear system has no unique solution."""


class UnsupportedRegimeError(HanleError, ValueError):
    """The requested parameters fall outside what a code path supports."""


class DegenerateResonanceError(HanleError, ArithmeticError):
    """The resonance denominator has a non-positive discriminant."""


class NoReversalError(HanleError, ArithmeticError):
    """No sign change of the symmetric amplitude was bracketed."""


class GridTooNarrowError(HanleError, ValueError):
    """A sampled curve does not reach the half-height level on both sides."""
