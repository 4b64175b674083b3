"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Raised when an argument is outside the domain a routine supports."""


class UnidentifiableRegimeError(ParameterError):
    """Raised when requested problem parameters admit no valid threshold rule."""
