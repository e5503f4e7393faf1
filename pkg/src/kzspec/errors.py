class KZError(Exception):
    """Base class for computational errors raised by this package."""


class InsufficientDataError(KZError):
    pass


class CSVFormatError(KZError):
    """Malformed or non-contiguous CSV input. Carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedInputError(KZError):
    pass
