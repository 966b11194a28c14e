"""Exception types shared across the package."""


class GammaKineticsError(ValueError):
    """Base class for all errors raised by this package."""


class DomainError(GammaKineticsError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(GammaKineticsError):
    """An experiment configuration is inconsistent or incomplete."""


class DegenerateDistributionError(DomainError):
    """A sample set carries no usable statistical information (e.g. zero variance)."""
