"""Exception hierarchy shared across the package."""


class LtcgifError(Exception):
    """Base class for all package errors."""


class FormatError(LtcgifError):
    """Raised when binary/image data does not match its declared layout."""


class ParseError(LtcgifError):
    """Raised on malformed text inputs (playlists, manifests, schedules)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TransportError(LtcgifError):
    """Raised when an HTTP fetch fails after exhausting retries."""


class NotFoundError(TransportError):
    """Raised on HTTP 404 for a requested resource."""


class InferenceError(LtcgifError):
    """Raised when a scoring backend cannot load or produces bad shapes."""


class PrepError(LtcgifError):
    """Raised when media ingestion (transcode/segment/thumbnail) fails."""


class TruncationError(LtcgifError):
    """Raised when a media source is shorter than the requested span."""
