"""Exception hierarchy shared by the numerical and exact layers."""


class BellError(Exception):
    """Base class for errors raised by this package."""


class DomainError(BellError, ValueError):
    """An argument lies outside the supported domain (negative index, n = 0 for
    integral formulas, index above the soft cap, ...)."""


class PrecisionError(BellError, ValueError):
    """Requested working precision is below the supported minimum."""


class ConvergenceError(BellError, ArithmeticError):
    """Node doubling hit its cap before two successive estimates agreed."""

    def __init__(self, message, previous=None, last=None, nodes=None):
        super().__init__(message)
        self.previous = previous
        self.last = last
        self.nodes = nodes


class InvariantError(BellError, AssertionError):
    """An internal consistency check failed. Always a bug."""
