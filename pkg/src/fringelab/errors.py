"""Exception types shared across the package."""


class FringelabError(ValueError):
    """Base class for all fringelab errors."""


class GridTooCoarseError(FringelabError):
    """Sampling step too large to resolve the requested coherence/pulse scale."""


class TraceTooShortError(FringelabError):
    """A delay, window or lag does not fit inside the (valid part of a) trace."""


class PolarizationMismatchError(FringelabError):
    """Local oscillator and field polarizations do not match."""


class ProfileMismatchError(FringelabError):
    """Local-oscillator temporal profile incompatible with the measured field."""


class CorrelationNotPSDError(FringelabError):
    """Pulse-amplitude correlation matrix is not positive semidefinite."""


class PulseOverlapError(FringelabError):
    """Pulse width too large for the requested pulse separation."""


class ConfigError(FringelabError):
    """Scenario configuration failed validation."""


class OracleSelfCheckError(FringelabError):
    """An oracle's cross-check at refined resolution disagreed with its value."""
