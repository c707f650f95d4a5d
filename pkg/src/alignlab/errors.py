"""Exception and warning types shared across the package."""


class ShapeError(ValueError):
    """Array dimensions disagree with what an operation requires."""


class DomainError(ValueError):
    """An argument lies outside the operation's domain (e.g. tau <= 0)."""


class StateError(RuntimeError):
    """An object is used in a state that does not permit the call."""


class ConfigError(ValueError):
    """Invalid run configuration. ``field`` names the offending key."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class InsufficientDataError(ValueError):
    """A statistical estimate was requested from too few samples."""


class NumericalAbort(FloatingPointError):
    """Non-finite gradients encountered during an update phase."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class CertificationWarning(UserWarning):
    """A stability condition does not hold for the configured constants."""
