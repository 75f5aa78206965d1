"""Exception hierarchy shared by every module."""


class CkaError(Exception):
    """Base class for all library errors."""


class GraphFormatError(CkaError, ValueError):
    """Malformed graph text or an invalid graph structure."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"line {line}, col {col}: {message}"
        super().__init__(message)


class UnknownVertexError(CkaError, ValueError):
    pass


class PreconditionError(CkaError, ValueError):
    """An operation was called outside its domain."""


class CapExceededError(CkaError):
    """An exponential enumeration would pass its configured cap."""


class CycleLimitExceeded(CapExceededError):
    pass


class InvariantViolation(CkaError, AssertionError):
    """A structural law that must always hold was broken; always a bug."""
