"""Exception types raised by the library."""


class PolestimError(Exception):
    """Base class for all library errors."""


class DomainError(PolestimError, ValueError):
    """An argument lies outside the domain of the operation."""


class NotInteriorError(DomainError):
    """The likelihood maximum sits on the boundary of the parameter space."""


class DegenerateError(DomainError):
    """A quantity is undefined for the given input (zero sign, zero variance)."""


class SingularError(DomainError):
    """An information matrix is not invertible."""


class NoDataError(DomainError):
    """A distribution carries no conditional probability mass."""


class ConsistencyError(PolestimError, ArithmeticError):
    """A computed probability strayed further than rounding noise allows."""
