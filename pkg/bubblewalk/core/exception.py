from typing import Any, Optional
from ..schemas.result import ErrorCategory


class BubblewalkException(Exception):
    """Base exception class for all bubblewalk errors"""

    def __init__(self, message: str, exit_code: int, category: ErrorCategory):
        super().__init__(message)
        self.message = message
        self.exit_code = exit_code
        self.category = category


class ValidationException(BubblewalkException):
    """Exception raised for invalid parameters or malformed input"""

    def __init__(self, message: str, field: Optional[str] = None):
        if field:
            error_message = f"Validation failed for '{field}': {message}"
        else:
            error_message = f"Validation failed: {message}"

        super().__init__(
            message=error_message,
            exit_code=2,
            category=ErrorCategory.VALIDATION,
        )


class AlphaOutOfRangeException(BubblewalkException):
    """Exception raised when an explicit scaling list has no value for a level"""

    def __init__(self, level: int, defined: int):
        super().__init__(
            message=f"Scaling rule defines {defined} level(s); level {level} is out of range.",
            exit_code=3,
            category=ErrorCategory.OUT_OF_RANGE,
        )
        self.level = level


class LevelDepthException(BubblewalkException):
    """Exception raised when a computation needs a level beyond the depth cap"""

    def __init__(self, level: int, cap: int):
        super().__init__(
            message=f"Level {level} exceeds the supported depth {cap}.",
            exit_code=3,
            category=ErrorCategory.OUT_OF_RANGE,
        )
        self.level = level


class ResourceGuardException(BubblewalkException):
    """Exception raised when a request would exceed a configured resource limit"""

    def __init__(self, guard: str, limit: Any, requested: Any):
        super().__init__(
            message=f"Resource guard '{guard}' exceeded: requested {requested}, limit {limit}.",
            exit_code=4,
            category=ErrorCategory.RESOURCE_GUARD,
        )
        self.guard = guard
        self.limit = limit
        self.requested = requested


class NoDataException(BubblewalkException):
    """Exception raised when an estimate has no accepted samples to rest on"""

    def __init__(self, message: str = "No accepted samples; no estimate was produced."):
        super().__init__(
            message=message,
            exit_code=5,
            category=ErrorCategory.NO_DATA,
        )


class OutputException(BubblewalkException):
    """Exception raised when results cannot be written"""

    def __init__(self, path: str, reason: Optional[str] = None):
        message = f"Cannot write output to '{path}'."
        if reason:
            message = f"{message} {reason}"
        super().__init__(
            message=message,
            exit_code=6,
            category=ErrorCategory.OUTPUT,
        )
