"""Exception hierarchy for the buggin toolkit."""


class BugginError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(BugginError):
    """A corpus record is missing a required field."""


class ParseError(BugginError):
    """A field value could not be parsed (e.g. a non-boolean flag)."""


class DuplicateIdError(BugginError):
    """Two corpus records share the same bug_id."""


class StratificationError(BugginError):
    """A class is absent or too small for the requested stratified split."""


class RemoteError(BugginError):
    """Base class for issue-tracker client failures."""


class NotFoundError(RemoteError):
    """The tracker does not know the requested bug id."""


class TransportError(RemoteError):
    """Network-level failure that persisted through all retries."""


class DecodeError(RemoteError):
    """The tracker responded with a payload we could not decode."""


class EmptyVocabularyError(BugginError):
    """Fitting a vectorizer on documents that contain no tokens at all."""


class EmbeddingFormatError(BugginError):
    """An imported embedding file violates its declared manifest."""


class EmbeddingValidationError(BugginError):
    """An imported embedding vector contains non-finite components."""


class EmbeddingLookupError(BugginError):
    """A requested bug_id has no vector in the embedding table."""


class BalanceError(BugginError):
    """Oversampling preconditions are not met (e.g. single-class input)."""


class InsufficientMinorityError(BalanceError):
    """The minority class is too small to interpolate (fewer than 2 rows)."""


class TrainingError(BugginError):
    """A model cannot be fitted on the given data (e.g. one class only)."""


class ConvergenceError(BugginError):
    """An iterative solver hit its iteration cap before reaching tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DimensionMismatchError(BugginError):
    """Vector or matrix dimensions do not line up."""


class UndefinedMetricError(BugginError):
    """A metric is undefined for the given inputs (e.g. AUC on one class)."""


class GridSearchError(BugginError):
    """Every configuration in a grid search failed."""


class ConfigError(BugginError):
    """A run or model configuration is invalid."""


class StageError(BugginError):
    """A pipeline stage failed; carries the stage name for context."""

    def __init__(self, stage, message):
        super().__init__(f"stage '{stage}': {message}")
        self.stage = stage
