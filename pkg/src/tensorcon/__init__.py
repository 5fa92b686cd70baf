"""tensorcon - Constrained expressions that satisfy boundary constraints for any free function."""

__version__ = "0.1.0"

from tensorcon.base import Object
from forwardpy import impl

__all__ = ["Object", "impl"]
