"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A numerical kernel (SVD, eigensolver) failed to converge."""


class CapacityError(ValueError):
    """Requested dense object exceeds the supported size."""


class FcidumpError(ValueError):
    """Malformed or inconsistent FCIDUMP content."""


class ScfConvergenceError(RuntimeError):
    """Self-consistent field iteration did not converge."""


class EmbeddingError(RuntimeError):
    """Bath construction or chemical-potential fitting failed."""
