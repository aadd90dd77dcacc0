"""Exception types shared across the package."""


class GlocalError(Exception):
    """Base class for all package errors."""


class InputError(GlocalError, ValueError):
    """Malformed or out-of-range input (bad ids, weights, file contents)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SizeGuardError(InputError):
    """Graph too large for a brute-force reference routine."""


class ConvergenceError(GlocalError, ArithmeticError):
    """An iterative solver ran out of iterations."""

    def __init__(self, message, converged=0):
        super().__init__(message)
        self.converged = converged
