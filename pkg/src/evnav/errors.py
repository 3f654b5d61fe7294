"""Exception types shared across the package."""


class EvnavError(Exception):
    """Base class for evnav-specific errors."""


class NoPathError(EvnavError):
    """The target vertex is unreachable from the source."""


class InvalidWeightError(EvnavError, ValueError):
    """An edge weight is negative, NaN, or infinite."""


class PathExplosionError(EvnavError):
    """Path enumeration exceeded the requested bound."""


class NonPositiveObservationError(EvnavError, ValueError):
    """A log-Gaussian belief received an observation <= 0."""


class NetworkFormatError(EvnavError, ValueError):
    """A network file violates the documented schema."""


class ConfigError(EvnavError, ValueError):
    """A scenario or sweep configuration failed validation."""
