"""Exception hierarchy shared by all modules."""


class FiberentError(Exception):
    """Base class for package errors."""


class DomainError(FiberentError, ValueError):
    """A physical parameter lies outside the region where a formula is valid."""


class ShapeError(FiberentError, ValueError):
    """Operators or states built on incompatible bases."""


class ConfigError(FiberentError, ValueError):
    """Invalid scenario configuration."""


class NumericalError(FiberentError, ArithmeticError):
    """Propagation produced non-finite or unphysical values."""


class DegeneracyError(FiberentError):
    """The Liouvillian null space is not one-dimensional."""

    def __init__(self, dimension, message=None):
        self.dimension = dimension
        super().__init__(message or f"steady state is not unique: null-space dimension {dimension}")


class VerificationError(FiberentError):
    """Analytic dressed states disagree with numerical diagonalization."""

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)
