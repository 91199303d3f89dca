class SingularBIEError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(SingularBIEError, ValueError):
    """Invalid parameter value (alpha out of range, bad grid size, ...)."""


class PoleError(SingularBIEError, ValueError):
    """Gamma function evaluated at a nonpositive integer."""


class ConvergenceError(SingularBIEError, ArithmeticError):
    """A series diverges or failed to converge."""


class SingularityError(SingularBIEError, ArithmeticError):
    """Kernel evaluated on (or numerically at) its diagonal."""


class DomainError(SingularBIEError, ValueError):
    """Point or geometry outside the region an operation supports."""


class SingularSystemError(SingularBIEError, ArithmeticError):
    """Density system is singular or too ill-conditioned to solve."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class EigenvalueCaseError(SingularSystemError):
    """Q1 density equation at lambda = -2, where constants are eigenfunctions."""


class CompatibilityError(SingularBIEError, ValueError):
    """Surface and plane Dirichlet data disagree on the rim curve."""
