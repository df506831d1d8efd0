"""Optical onion routing: LFSR session keys, layered XOR onions, and the
availability, wiretap and equivocation analyses of WDM wavelength paths."""

from .bits import Bits
from .errors import OorError

__version__ = "0.1.0"
__all__ = ["Bits", "OorError", "__version__"]
