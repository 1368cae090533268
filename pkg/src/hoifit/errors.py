"""Exception types shared across the package."""


class HoiFitError(Exception):
    """Base class for all package errors."""


class InvalidInputError(HoiFitError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateNormalError(HoiFitError):
    """A part's area-weighted mean normal cancels to (near) zero."""


class DegenerateConfigurationError(HoiFitError):
    """A point configuration is too degenerate for the requested fit."""


class BehindCameraError(HoiFitError):
    """A 3D point with z <= 0 was passed to a perspective projection."""


class OptimizationFailureError(HoiFitError):
    """Optimization produced a non-finite energy."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class NoCandidateError(HoiFitError):
    """A retrieval filter left no database candidates."""


class MissingPartError(HoiFitError):
    """An interaction pair names a part absent from the mesh."""


class MissingPriorError(HoiFitError):
    """A scale prior is missing for an instance."""


class PriorParseError(HoiFitError):
    """A prior completion could not be parsed."""

    def __init__(self, message, raw_text=""):
        super().__init__(message)
        self.raw_text = raw_text


class SizeSanityError(HoiFitError):
    """A parsed object size falls outside the plausible band."""


class NormalizationError(HoiFitError):
    """No interaction pair survived part-label normalization."""


class CacheMissError(HoiFitError):
    """Replay-only prior client got a prompt that is not in the cache."""
