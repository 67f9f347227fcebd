"""Services for the application."""
from .lattice import Lattice, Sublattice, TorsionQuadraticForm, direct_sum, overlattice_from_glue
from .genus import GenusSymbol, JordanSymbol, genus_symbol, orthogonal_genus
from .cyclo import PhiConstraints, PhiLattice, enumerate_phi_lattices, mod2_factor_check
from .isometries import definite_orthogonal_group, isometry_test

__all__ = [
    "Lattice",
    "Sublattice",
    "TorsionQuadraticForm",
    "direct_sum",
    "overlattice_from_glue",
    "GenusSymbol",
    "JordanSymbol",
    "genus_symbol",
    "orthogonal_genus",
    "PhiConstraints",
    "PhiLattice",
    "enumerate_phi_lattices",
    "mod2_factor_check",
    "definite_orthogonal_group",
    "isometry_test",
]
