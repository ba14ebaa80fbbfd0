"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid input data or parameters (CLI exit code 2)."""


class InternalError(RuntimeError):
    """An internal invariant was violated (CLI exit code 3)."""
