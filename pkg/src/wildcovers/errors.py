"""Exception hierarchy.

Each class maps onto one CLI exit code, see :mod:`wildcovers.cli`.
"""


class CoverError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class ParseError(CoverError):
    """Malformed JSON payload."""

    exit_code = 2


class UsageError(CoverError, ValueError):
    """A precondition of an operation was violated."""

    exit_code = 3


class DomainError(CoverError, ArithmeticError):
    """A mathematically undefined operation, e.g. inverting zero."""

    exit_code = 3


class PrecisionError(UsageError):
    """A truncated series does not carry enough terms for the request."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class AnomalousCurveError(CoverError):
    """Globalization refused: the curve's H^1 obstruction cannot be killed."""

    exit_code = 4

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness or {}


class IntegrityError(CoverError):
    """Two independent computations of the same quantity disagree."""

    exit_code = 5
