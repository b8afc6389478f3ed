"""Exception types shared across the package."""


class SkewBMError(Exception):
    """Base class for all package errors."""


class DomainError(SkewBMError, ValueError):
    """An input violates a mathematical precondition (t <= 0, ell < 0, ...)."""


class QuadratureError(SkewBMError, ArithmeticError):
    """A quadrature could not meet its accuracy contract (truncation tail too fat)."""


class SamplerError(SkewBMError, RuntimeError):
    """A rejection loop exceeded its iteration cap."""


class ConfigError(SkewBMError, ValueError):
    """A check suite or run configuration is malformed (unknown kind, bad bins, ...)."""
