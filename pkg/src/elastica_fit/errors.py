"""Exception types shared across the package."""


class ElasticaError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ElasticaError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularModulusError(DomainError):
    """The elliptic modulus lies inside the guard band around k = 1,
    where the quarter period diverges."""


class DegenerateInputError(ElasticaError, ValueError):
    """The input curve is degenerate (zero length, collinear moment system, ...)."""
