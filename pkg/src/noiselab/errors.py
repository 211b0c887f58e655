"""Exception types shared across the package."""


class NoiseLabError(Exception):
    """Base class for library errors."""


class AmbientMismatchError(NoiseLabError, ValueError):
    """Operands live in different product groups."""


class CapExceededError(NoiseLabError, ValueError):
    """A hard size cap was hit; caps are errors, never silent truncation."""


class NotIdentifiableError(NoiseLabError, ValueError):
    """The requested quantity is not determined by the measured moments."""


class NonPositiveMomentError(NoiseLabError, ValueError):
    """A moment required to be positive is zero or negative."""


class ConfigError(NoiseLabError, ValueError):
    """Invalid configuration file or parameters."""
