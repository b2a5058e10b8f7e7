"""Exception hierarchy shared by every scenicness module.

Each class also subclasses a built-in exception so callers that only know
about ``ValueError`` or ``ArithmeticError`` keep working.
"""


class ScenicnessError(Exception):
    """Base class for all errors raised by the toolkit."""


class InvalidInputError(ScenicnessError, ValueError):
    """An argument or data record violates a documented precondition."""


class ConfigError(ScenicnessError, ValueError):
    """A configuration, spec or grid definition is invalid."""


class ConstraintViolationError(InvalidInputError):
    """A crop rectangle lies outside the feasible region."""


class DivergedError(ScenicnessError, ArithmeticError):
    """Training produced a non-finite loss."""

    def __init__(self, message: str, epoch: int, batch: int):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


# ---------------------------------------------------------------------------
# Manifest validation
# ---------------------------------------------------------------------------


class ManifestError(InvalidInputError):
    """Base class for manifest validation failures."""


class ManifestParseError(ManifestError):
    """A manifest line or document could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateIdError(ManifestError):
    """Two manifest records share the same id."""


class RatingRangeError(ManifestError):
    """A rating lies outside 1..10."""


class MissingFieldError(ManifestError):
    """A required manifest field is empty or absent."""


# ---------------------------------------------------------------------------
# Model files
# ---------------------------------------------------------------------------


class ModelFileError(InvalidInputError):
    """Base class for model (de)serialization failures."""


class ModelVersionError(ModelFileError):
    """The file's format version is not supported."""


class ModelDimensionError(ModelFileError):
    """Stored parameter shapes disagree with the declared layer dims."""


class CorruptModelFileError(ModelFileError):
    """The file is truncated, not JSON, or lacks required keys."""
