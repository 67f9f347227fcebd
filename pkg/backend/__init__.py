"""Backend package for enriques-lattice."""
from .src import settings

__all__ = ["settings"]
