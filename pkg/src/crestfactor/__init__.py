"""Crest-factor diagnostics for spectral PDE simulations."""

__version__ = "0.1.0"

from .crest import CrestSeries, crest, crest_value
from .errors import (ConfigurationError, CrestFactorError, DegenerateFieldError,
                     DegenerateForcingError, DomainError, InstabilityError)
from .ledger import NormLedger, derived_constants, forcing_spectrum, jn, long_time_average
from .spectral import PeriodicGrid, SpectralField, norm, to_physical, to_spectral

__all__ = [
    "ConfigurationError", "CrestFactorError", "CrestSeries", "DegenerateFieldError",
    "DegenerateForcingError", "DomainError", "InstabilityError", "NormLedger", "PeriodicGrid",
    "SpectralField", "crest", "crest_value", "derived_constants", "forcing_spectrum", "jn",
    "long_time_average", "norm", "to_physical", "to_spectral",
]
