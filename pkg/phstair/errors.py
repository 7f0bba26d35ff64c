from __future__ import absolute_import


class StaircaseError(Exception):
    """Base class for every failure raised by phstair."""


class OutOfRange(StaircaseError, ValueError):
    pass


class NonRational(StaircaseError, TypeError):
    pass


class DomainError(StaircaseError, ValueError):
    pass


class PreconditionError(StaircaseError, ValueError):
    pass


class ModeError(StaircaseError):
    pass


class QuadratureFailure(StaircaseError, ArithmeticError):
    pass


class SingularDomain(StaircaseError, ValueError):
    pass


class InsufficientSample(StaircaseError):
    pass
