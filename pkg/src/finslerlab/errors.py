"""Exception hierarchy shared by every module of the package."""


class FinslerError(Exception):
    """Base class for all errors raised by finslerlab."""


class UsageError(FinslerError):
    """Wrong kind of metric or sample, bad parameter, unsupported dimension."""


class DomainError(FinslerError):
    """A base point (or a differentiation stencil) lies outside the metric's domain."""


class NumericsError(FinslerError):
    """Non-finite values, differentiation at a non-smooth point, and similar."""


class SingularMetric(NumericsError):
    """The fundamental tensor is not positive definite where it must be inverted."""


class SqrtOfNegativeReal(NumericsError):
    pass


class DivisionNearZero(NumericsError):
    pass


class ResidualImaginaryPart(NumericsError):
    """A metric expression evaluated to a value with a non-negligible imaginary part."""
