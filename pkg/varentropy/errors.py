"""Exception classes for Varentropy.

Domain errors (an argument outside its admissible range) are kept apart
from numerical failures (a solver or quadrature that did not converge), so
callers can tell "alpha is too large" from "the bisection gave up".
"""


class VarentropyError(Exception):
    """Base class for every error raised by the package.
    """


class DomainError(VarentropyError, ValueError):
    """An argument lies outside the admissible range of an operation.
    """


class SupportError(DomainError):
    """A point lies outside the support of a density.

    The information content at such a point is infinite.
    """


class SolverError(VarentropyError, ArithmeticError):
    """A numerical method failed to produce an answer.
    """


class QuadratureError(SolverError):
    """Adaptive quadrature did not converge or returned a non-finite value.
    """


class ConfigError(VarentropyError, ValueError):
    """A run configuration is malformed.
    """


class UnsupportedFamilyError(VarentropyError):
    """The operation is not available for the given density family.
    """
