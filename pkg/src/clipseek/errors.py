"""Exception hierarchy shared across the clipseek pipeline.

Every error raised by library code derives from ClipseekError and carries a
stable machine code (used by the HTTP service and CLI exit-code mapping).
"""


class ClipseekError(Exception):
    """Base class; `code` is the stable machine-readable identifier."""

    code = "Internal"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)


class MalformedImage(ClipseekError):
    code = "MalformedImage"


class UnsupportedFormat(ClipseekError):
    code = "UnsupportedFormat"


class DimensionMismatch(ClipseekError):
    code = "DimensionMismatch"


class EmptySequence(ClipseekError):
    code = "EmptySequence"


class EmptyDirectory(ClipseekError):
    code = "EmptyDirectory"


class TooNarrow(ClipseekError):
    code = "TooNarrow"


class TooSmall(ClipseekError):
    code = "TooSmall"


class Overflow(ClipseekError):
    code = "Overflow"


class ParseFailure(ClipseekError):
    code = "ParseFailure"


class BadPixelCount(ClipseekError):
    code = "BadPixelCount"


class DuplicateKeyframe(ClipseekError):
    code = "DuplicateKeyframe"


class TooFewKeyframes(ClipseekError):
    code = "TooFewKeyframes"


class NoMotion(ClipseekError):
    code = "NoMotion"


class DegeneratePolyline(ClipseekError):
    code = "DegeneratePolyline"


class LengthMismatch(ClipseekError):
    code = "LengthMismatch"


class BadCoordinates(ClipseekError):
    code = "BadCoordinates"


class NameTooLong(ClipseekError):
    code = "NameTooLong"


class StorageFull(ClipseekError):
    code = "StorageFull"


class NotFound(ClipseekError):
    code = "NotFound"


class CorruptJournal(ClipseekError):
    code = "CorruptJournal"


class NoRetrievals(ClipseekError):
    code = "NoRetrievals"


class NoRelevantVideos(ClipseekError):
    code = "NoRelevantVideos"
