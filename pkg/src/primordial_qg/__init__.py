"""Gravitational decoherence of primordial massive particles in thermal baths."""
from .errors import PrimordialQGError

__version__ = "0.1.0"
__all__ = ["PrimordialQGError", "__version__"]
