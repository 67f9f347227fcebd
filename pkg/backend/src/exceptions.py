"""Typed errors raised by the lattice services and engines."""
from typing import Any, Optional


class LatticeError(ValueError):
    """Base class for every error raised by the library."""


class DegenerateLatticeError(LatticeError):
    """Gram matrix is singular, or a rescale factor is zero."""


class NotEvenError(LatticeError):
    """Operation needs an even integral lattice."""


class UnsupportedError(LatticeError):
    """Input is outside the supported domain (odd 2-adic part, indefinite, ...)."""


class GlueError(LatticeError):
    """Glue subgroup is not isotropic, or a glue bound is undefined."""


class NotAWallError(LatticeError):
    """Vector is not a wall of the given chamber."""


class FixtureError(LatticeError):
    """Malformed lattice file or fixture spec."""


class SetupValidationError(LatticeError):
    """An EnriquesSetup invariant failed.

    Attributes:
        clause: Short name of the violated invariant
    """

    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        message = f"setup invariant '{clause}' violated"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class ChamberBudgetExceeded(LatticeError):
    """The chamber BFS registered more chambers than allowed.

    Attributes:
        partial: Partial state (representatives and generators found so far)
    """

    def __init__(self, budget: int, partial: Optional[Any] = None):
        self.budget = budget
        self.partial = partial
        super().__init__(f"chamber budget of {budget} exhausted")
