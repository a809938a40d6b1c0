"""
Custom exception classes for better error handling.
Each error knows its HTTP status and CLI exit code.
"""


class GraphSmoothError(Exception):
    """Base class for every graphsmooth error."""
    status_code: int = 400
    exit_code: int = 2
    default_detail: str = "graphsmooth error"

    def __init__(self, detail: str = None):
        self.detail = detail or self.default_detail
        super().__init__(self.detail)


class InvalidSizeError(GraphSmoothError):
    """Raised when a size parameter (T, n) is out of range."""
    default_detail = "Invalid size"


class InvalidParameterError(GraphSmoothError):
    """Raised when a real-valued parameter is out of range."""
    default_detail = "Invalid parameter"


class DimensionMismatchError(GraphSmoothError):
    """Raised when operand dimensions do not agree."""
    default_detail = "Dimension mismatch"


class DisconnectedGraphError(GraphSmoothError):
    """Raised when a connected graph is required."""
    status_code = 422
    default_detail = "Graph is not connected"


class SingularSystemError(GraphSmoothError):
    """Raised when the penalized normal equations are singular (rank(O_T) < n)."""
    status_code = 422
    default_detail = "Penalized system is singular"


class UnderdeterminedSystemError(GraphSmoothError):
    """Raised when the centered system is under-determined (rank(O_T) < n - 1)."""
    status_code = 422
    default_detail = "Centered system is under-determined"


class BoundInvariantError(GraphSmoothError):
    """Raised when bound inputs violate b2 < b3 or positivity."""
    status_code = 422
    default_detail = "Bound inputs violate their invariants"


class SizeLimitError(GraphSmoothError):
    """Raised when a dense computation would exceed the size limit."""
    status_code = 413
    default_detail = "Problem too large for dense evaluation"


class ConfigError(GraphSmoothError):
    """Raised when an experiment configuration is invalid."""
    default_detail = "Invalid configuration"


class VerificationFailedError(GraphSmoothError):
    """Raised when an empirical verification sweep fails."""
    status_code = 422
    exit_code = 3
    default_detail = "Verification failed"


class StorageError(GraphSmoothError):
    """Raised when reading or writing results fails."""
    status_code = 500
    exit_code = 1
    default_detail = "Result storage failed"
