"""Exception types shared across the package.

Every domain error raised by gazeforge derives from :class:`GazeForgeError`,
so callers (CLI, service) can map the whole family to exit code 1 / HTTP 422
without enumerating subclasses.
"""


class GazeForgeError(Exception):
    """Base class for all gazeforge domain errors."""


class InvalidArgumentsError(GazeForgeError):
    """An argument violates a documented precondition or invariant."""


class InvalidCovarianceError(GazeForgeError):
    """A 2x2 covariance matrix is not symmetric positive-definite."""


class DegenerateMapError(GazeForgeError):
    """A saliency map has no positive mass where mass is required."""


class EmptyFixationsError(GazeForgeError):
    """No in-bounds fixation is available for a fixation-based operation."""


class UndefinedMetricError(GazeForgeError):
    """A metric is undefined for the given inputs (e.g. constant map)."""

    def __init__(self, metric, reason):
        self.metric = metric
        self.reason = reason
        super().__init__(f"{metric} undefined: {reason}")


class ShapeMismatchError(GazeForgeError):
    """Two rasters that must share dimensions do not."""


class EmptyDatasetError(GazeForgeError):
    """A guidance index holds no records."""


class IndexMismatchError(GazeForgeError):
    """Embedder and index disagree on identity or dimension."""


class EmptySequenceError(GazeForgeError):
    """A saliency sequence has no frames (or no evaluable overlap)."""


class FormatError(GazeForgeError):
    """A serialized artifact (SMAP, SSEQ, PNG, index, JSON spec) failed to parse."""


class IngestError(GazeForgeError):
    """Corpus ingestion failed beyond the tolerated error budget."""

    def __init__(self, message, failures=None):
        super().__init__(message)
        self.failures = list(failures or [])


class BackendError(GazeForgeError):
    """A generation/embedding backend reported an application error."""


class BackendUnreachableError(BackendError):
    """Transport to the backend failed after all retries."""


class MalformedResponseError(BackendError):
    """The backend answered with a payload outside the documented protocol."""
