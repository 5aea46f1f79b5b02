"""Package-wide exception types."""


class DataError(ValueError):
    """Raised when input data violates a domain requirement (e.g. log of a
    non-positive value); message names the offending series and row."""


class EstimationError(RuntimeError):
    """Raised when a numerical estimation step cannot produce a result."""
