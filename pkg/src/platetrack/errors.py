"""Exception hierarchy shared across the toolkit."""


class PlatetrackError(Exception):
    """Base class for every error raised by this package."""


class FormatError(PlatetrackError):
    """Malformed file content (PNM image or EMAP tensor).

    ``offset`` is the byte position at which parsing failed, when known.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ArgumentError(PlatetrackError, ValueError):
    """Invalid argument to an operation (bad dims, even kernel size, ...)."""


class ConfigError(PlatetrackError):
    """Invalid configuration value, e.g. an unparseable plate pattern."""


class StoreError(PlatetrackError):
    """Base class for tracking-store failures."""


class UnknownCameraError(StoreError):
    """A sighting referenced a camera id that does not exist."""


class DuplicateEntityError(StoreError):
    """Attempt to create a camera or user whose id already exists."""


class UnknownEntityError(StoreError):
    """Attempt to delete or address a camera/user that does not exist."""


class RecoveryError(StoreError):
    """Persistent log is corrupt beyond the torn-tail case."""


class InvalidCredentials(PlatetrackError):
    """Login rejected; unknown user and wrong password are indistinguishable."""
