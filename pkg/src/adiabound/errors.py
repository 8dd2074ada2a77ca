"""Exception hierarchy.

Numerical failures derive from :class:`NumericalError` so that front ends can
map them to a single exit status.
"""


class AdiaboundError(Exception):
    """Base class for all package errors."""


class ConfigError(AdiaboundError, ValueError):
    """Invalid run configuration or model parameters."""


class DomainError(AdiaboundError, ValueError):
    """Argument outside the domain of a formula."""


class NumericalError(AdiaboundError, ArithmeticError):
    """A computation could not produce a trustworthy result."""


class NonConvergence(NumericalError):
    """The dense eigensolver failed."""


class NoConvergence(NumericalError):
    """Step refinement did not reach the requested tolerance."""


class GapClosure(NumericalError):
    """An instantaneous two-level gap is below the degeneracy threshold."""


class DimensionTooLarge(AdiaboundError, ValueError):
    """Dense Hilbert space exceeds the supported dimension."""


class NormViolation(DomainError):
    """A state vector is not normalized."""


class DegenerateArea(NumericalError):
    """Reference band has zero area, so area ratios are undefined."""


class NoCrossing(NumericalError):
    """The fidelity trace never reaches the requested level."""


class EpsilonOutOfRange(DomainError):
    """Adiabaticity tolerance outside (0, 1 - 1/e)."""
