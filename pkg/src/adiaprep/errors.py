"""Exception types shared across the package."""


class AdiaprepError(Exception):
    """Base class for all package-specific errors."""


class DomainError(AdiaprepError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class OutOfRangeError(DomainError):
    """A target value lies outside the attainable range of a function."""


class NoConvergenceError(AdiaprepError, RuntimeError):
    """An iterative method hit its iteration cap without converging."""


class ResourceLimitError(AdiaprepError, MemoryError):
    """A requested computation exceeds the configured memory cap."""


class MonotonicityError(AdiaprepError, RuntimeError):
    """A constructed schedule failed its monotonicity check."""


class DegenerateGapError(AdiaprepError, RuntimeError):
    """Eigenstate tracking failed because levels are (nearly) degenerate."""


class InsufficientSpanError(AdiaprepError, ValueError):
    """Input data does not span a wide enough range for the requested fit."""


class ConfigError(AdiaprepError, ValueError):
    """An experiment configuration failed schema validation."""
