"""Exception types shared across the package."""


class TraceKitError(Exception):
    """Base class for all package errors."""


class InputError(TraceKitError, ValueError):
    """Malformed input: bad words, mismatched endpoints, schema violations.

    ``field`` optionally points at the offending field of an input document.
    """

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class ConsistencyError(TraceKitError, RuntimeError):
    """Two independent computation routes disagreed.

    This is a hard failure: it means an internal identity that must hold
    (Lefschetz two-route equality, transfer closed form vs. homology class,
    hocolim trace vs. blockwise sum) was violated.
    """
