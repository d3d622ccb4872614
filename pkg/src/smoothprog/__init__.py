"""Numerical toolkit for smooth numbers in arithmetic progressions and the
Dirichlet L-function data that governs them."""

__version__ = "0.1.0"

from .errors import (CapacityError, ConfigError, DomainError, NumericalError, RangeError,
                     SmoothProgError)

__all__ = ["CapacityError", "ConfigError", "DomainError", "NumericalError", "RangeError",
           "SmoothProgError", "__version__"]
