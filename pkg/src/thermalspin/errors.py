"""Exception types shared across the package."""


class ConsistencyError(RuntimeError):
    """An internal invariant failed (coefficient defect, entropy violation, ...).

    Never expected in normal use; the CLI maps it to exit status 1.
    """
