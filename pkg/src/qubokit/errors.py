"""Exception hierarchy shared by all qubokit modules."""


class QuboError(Exception):
    """Base class for every error raised by qubokit."""


class DimensionError(QuboError, ValueError):
    """Assignment or matrix has the wrong length/shape."""


class DomainError(QuboError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class ArityError(QuboError, ValueError):
    """A penalty row received the wrong number of variables."""


class PreconditionError(QuboError, ValueError):
    """An input violates a documented precondition."""


class InfeasibleError(QuboError, ValueError):
    """A constraint cannot be satisfied by any binary assignment."""


class DegreeError(QuboError, ValueError):
    """A polynomial has a higher degree than the operation supports."""


class SizeError(QuboError, ValueError):
    """Model too large for exhaustive enumeration."""


class FormatError(QuboError, ValueError):
    """Malformed input file. ``lineno`` is 1-based when known."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
