"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 3,
DataError (and subclasses) -> 4, NumericError -> 5.
"""


class DrmError(Exception):
    """Base class for all package errors."""


class FormatError(DrmError):
    """Malformed container file (bad magic, truncated header/payload)."""


class CorruptionError(FormatError):
    """Header and payload disagree (e.g. declared dims vs actual bytes)."""


class DataError(DrmError):
    """Invalid data values (zero-norm rows, labels out of range, ...)."""


class ShapeError(DataError):
    """Dimension mismatch between operands."""


class ConfigError(DrmError):
    """Invalid or unknown configuration."""


class NumericError(DrmError):
    """Non-finite values where finite ones are required."""


class ProviderError(DrmError):
    """Embedding provider transport failure after retries."""

    def __init__(self, message: str, attempts: int = 1):
        super().__init__(message)
        self.attempts = attempts


class ProtocolError(ProviderError):
    """Embedding provider returned a malformed or mismatched response."""
