"""Exception types raised by gammaq.

Everything derived from :class:`ValidationError` describes bad input (an
out-of-range label, a malformed state file, a missing normalization entry)
and maps to exit code 1 in the CLI. Anything else is a computation failure.
"""


class GammaqError(Exception):
    """Base class for all gammaq errors."""


class ValidationError(GammaqError, ValueError):
    """Input that cannot be accepted."""


class InvalidIndexError(ValidationError):
    pass


class DegenerateStateError(ValidationError):
    pass


class DuplicateEntryError(ValidationError):
    pass


class DimensionError(ValidationError):
    pass


class UnitarityError(ValidationError):
    pass


class ConfigurationError(ValidationError):
    pass


class InvalidTargetError(ValidationError):
    pass


class UnknownStateError(ValidationError):
    pass


class StateFileError(ValidationError):
    pass
