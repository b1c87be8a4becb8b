"""Exception hierarchy shared by all modules."""


class PcfLaplaceError(Exception):
    """Base class for every error raised by this package."""


class DomainError(PcfLaplaceError, ValueError):
    """An argument lies outside the region where a routine is defined or supported."""


class PoleError(DomainError):
    """A gamma-function pole was hit (argument at or near a non-positive integer)."""


class ConvergenceError(PcfLaplaceError, ArithmeticError):
    """A series, continued fraction or quadrature failed to converge within budget."""


class LimitError(PcfLaplaceError, ArithmeticError):
    """A right limit f(0+) could not be extrapolated to the required agreement."""


class RewriteError(PcfLaplaceError, ValueError):
    """An image expression does not have the structure a rewrite rule requires."""


class CertificateError(PcfLaplaceError, ArithmeticError):
    """A derivation step failed its numerical certificate."""
