"""Exception hierarchy shared across the pipeline."""


class ShotVodError(Exception):
    """Base class for all pipeline errors."""


# --- frame store ---

class PathUnwritable(ShotVodError):
    pass


class CatalogCorrupt(ShotVodError):
    pass


class StoreLocked(ShotVodError):
    pass


class DuplicateShot(ShotVodError):
    pass


class TimeOrderViolation(ShotVodError):
    pass


class DimensionMismatch(ShotVodError):
    pass


class IoFailure(ShotVodError):
    pass


class EmptyShot(ShotVodError):
    pass


class UnknownShot(ShotVodError):
    pass


class IndexOutOfRange(ShotVodError):
    pass


class InvalidStride(ShotVodError):
    pass


# --- shot protocol ---

class MalformedMessage(ShotVodError):
    pass


class ConnectFailure(ShotVodError):
    pass


class NotifyTimeout(ShotVodError):
    pass


class MalformedAck(ShotVodError):
    pass


# --- ingest daemon ---

class BindFailure(ShotVodError):
    pass


class MissingTimesFile(ShotVodError):
    pass


class FrameCountMismatch(ShotVodError):
    pass


class CorruptFrame(ShotVodError):
    pass


# --- acquisition ---

class UnknownProfile(ShotVodError):
    pass


# --- video container ---

class NotAvi(ShotVodError):
    pass


class TruncatedFile(ShotVodError):
    pass


class EmptyInput(ShotVodError):
    pass
