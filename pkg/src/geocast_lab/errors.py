"""Exception types shared across the package."""


class GeocastError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(GeocastError, ValueError):
    """A numeric parameter is outside its admissible range."""


class ConfigurationError(GeocastError, ValueError):
    """Mutually inconsistent inputs (recipe vs. reference placement, ...)."""


class InfeasibleThresholdError(GeocastError, ValueError):
    """The requested BER threshold cannot be met at the given SNR."""
