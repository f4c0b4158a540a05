"""Bifurcation of rotating-slipping helices from the binormal flow.

The package covers the spectral analysis of the linearized profile
operator, Newton continuation of the nontrivial branches, reconstruction
of the tangent indicatrix and the curve, time-stepping checks, and the
Kida-class comparison.
"""

from .errors import (ConfigError, DivergenceError, DomainError, ExportError,
                     HelixBifError)
from .fourier import FourierProfile
from .operator import Geometry, ProblemParams

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DivergenceError", "DomainError", "ExportError", "HelixBifError",
    "FourierProfile", "Geometry", "ProblemParams", "__version__",
]
