"""Backend src package for enriques-lattice."""
from .config import settings

__all__ = ["settings"]
