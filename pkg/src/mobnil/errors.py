"""Exception types shared across the package."""


class MobnilError(Exception):
    """Base class for all library errors."""


class ValidationError(MobnilError, ValueError):
    """Bad input that the caller can fix."""


class CapacityError(MobnilError):
    """Request exceeds the configured memory or exhaustive-search budget."""


class RangeError(ValidationError):
    pass


class ParameterError(ValidationError):
    pass


class PreconditionError(ValidationError):
    pass


class DomainError(ValidationError):
    """A required evaluation point lies outside a phase's domain."""


class SpecError(ValidationError):
    pass


class IntervalTooShortError(PreconditionError):
    pass


class FormatError(MobnilError):
    """Malformed cache file (magic or version)."""


class ChecksumError(FormatError):
    pass


class AccuracyError(MobnilError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
