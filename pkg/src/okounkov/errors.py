"""Exception hierarchy shared by all modules."""


class OkounkovError(Exception):
    """Base class for library errors."""


class MismatchedBasisError(OkounkovError):
    pass


class PrecisionExhaustedError(OkounkovError):
    pass


class FieldClosureError(OkounkovError):
    pass


class DimensionMismatchError(OkounkovError, ValueError):
    pass


class TruncationInsufficientError(OkounkovError):
    """Raised when a finite truncation cannot certify a lowest term."""

    def __init__(self, msg, order=None, needed=None):
        super().__init__(msg)
        self.order = order
        self.needed = needed


class ModelConsistencyError(OkounkovError):
    pass


class UnsupportedError(OkounkovError):
    pass


class WallError(OkounkovError):
    """Weight ratio sits exactly on a chamber wall."""


class ConfigError(OkounkovError):
    pass
