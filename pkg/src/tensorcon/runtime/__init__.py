"""tensorcon.runtime - Infrastructure layer (ImplLoader)."""

from tensorcon.runtime.impl_loader import ImplLoader

__all__ = ["ImplLoader"]
