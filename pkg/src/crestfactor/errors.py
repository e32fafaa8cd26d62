"""Exception hierarchy shared by every module."""


class CrestFactorError(Exception):
    """Base class for all package errors."""


class ConfigurationError(CrestFactorError, ValueError):
    """Inconsistent sizes, malformed scenarios, bad truncation settings."""


class DomainError(CrestFactorError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class DegenerateFieldError(CrestFactorError, ValueError):
    """A norm used as a denominator fell below the configured floor."""


class DegenerateForcingError(CrestFactorError, ValueError):
    """Forcing ladder vanishes at some order, so its length scale is undefined."""


class InstabilityError(CrestFactorError, RuntimeError):
    """Time integration blew up or violated its step-size restriction."""
