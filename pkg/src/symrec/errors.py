"""Exception hierarchy shared across the toolkit."""


class SymrecError(Exception):
    """Base class for all toolkit errors."""


class RecordingParseError(SymrecError):
    """Raised when recording text is not valid JSON."""


class RecordingStructureError(SymrecError):
    """Raised when JSON parses but violates the recording structure
    (empty stroke list, empty stroke, point is not an object, ...)."""


class RecordingValueError(SymrecError, ValueError):
    """Raised when a point carries a non-numeric, non-finite or
    negative-time value."""


class ParameterError(SymrecError, ValueError):
    """Raised when an operation receives an out-of-range parameter."""


class ConfigError(SymrecError):
    """Raised for invalid experiment configuration (unknown step or
    feature names, out-of-range step parameters, unresolvable data
    sources)."""


class ModelLoadError(SymrecError):
    """Raised when a persisted model cannot be restored (version or
    shape mismatch, missing fields)."""


class TrainingError(SymrecError):
    """Raised when training produces a non-finite update."""


class StateError(SymrecError):
    """Raised when an operation runs against unusable state, e.g.
    classification with an empty template store."""


class StageError(SymrecError):
    """Raised when an experiment stage fails; names the stage and cause."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause
