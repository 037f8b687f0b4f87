"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input instance violates a model invariant."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative solver exhausts its iteration budget."""
