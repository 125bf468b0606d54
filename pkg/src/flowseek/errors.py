"""Exception types raised across the package."""


class FlowSeekError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(FlowSeekError, ValueError):
    """A numeric argument is non-finite or outside its domain."""


class CalibrationError(FlowSeekError, ValueError):
    """Calibration could not be computed (e.g. no samples)."""


class UndefinedBearingError(FlowSeekError, ValueError):
    """A bearing was requested for a zero-length vector."""


class ConfigError(FlowSeekError, ValueError):
    """The configuration file or a parameter value is invalid."""


class ReplayParseError(FlowSeekError, ValueError):
    """A replay CSV row could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ReplayValidationError(FlowSeekError, ValueError):
    """A replay stream violates the sample-stream invariants."""
