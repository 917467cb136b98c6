"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Argument outside the domain of an operation."""


class TruncationError(ValueError):
    """Requested weight truncation discards more mass than allowed.

    ``suggested_w_max`` carries the smallest truncation that would satisfy
    the threshold.
    """

    def __init__(self, message, suggested_w_max):
        super().__init__(message)
        self.suggested_w_max = suggested_w_max


class ResourceError(RuntimeError):
    """Dense computation would exceed the configured amplitude budget."""
