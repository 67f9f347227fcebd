"""Standard lattices: root lattices, hyperbolic planes, unimodular examples."""
from fractions import Fraction
from typing import List

from . import linalg
from .lattice import Lattice


def _chain(n: int) -> List[List[int]]:
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = 2
        if i + 1 < n:
            g[i][i + 1] = g[i + 1][i] = -1
    return g


def cartan_a(n: int) -> Lattice:
    """A_n root lattice (positive definite)."""
    if n < 1:
        raise ValueError("A_n needs n >= 1")
    return Lattice.from_rows(_chain(n), f"A{n}")


def cartan_d(n: int) -> Lattice:
    """D_n root lattice, n >= 4."""
    if n < 4:
        raise ValueError("D_n needs n >= 4")
    g = [row + [0] for row in _chain(n - 1)] + [[0] * n]
    g[n - 1][n - 1] = 2
    g[n - 1][n - 3] = g[n - 3][n - 1] = -1
    return Lattice.from_rows(g, f"D{n}")


def cartan_e(n: int) -> Lattice:
    """E_6, E_7 or E_8 root lattice."""
    if n not in (6, 7, 8):
        raise ValueError("E_n needs n in {6, 7, 8}")
    g = [row + [0] for row in _chain(n - 1)] + [[0] * n]
    g[n - 1][n - 1] = 2
    # branch node attached to the third node of the chain
    g[n - 1][2] = g[2][n - 1] = -1
    return Lattice.from_rows(g, f"E{n}")


def hyperbolic_plane() -> Lattice:
    """U = [[0, 1], [1, 0]]."""
    return Lattice.from_rows([[0, 1], [1, 0]], "U")


def l10() -> Lattice:
    """U + E8(-1), the even unimodular lattice of signature (1, 9)."""
    return Lattice(hyperbolic_plane().direct_sum(cartan_e(8).rescale(-1)).gram, "L10")


def euclidean_lattice(generators: List[List[Fraction]], name: str) -> Lattice:
    """Lattice generated by rational vectors of Euclidean space."""
    basis = linalg.rational_row_lattice_basis(linalg.frac_matrix(generators))
    return Lattice(basis.dot(basis.T), name)


def d_plus(n: int) -> Lattice:
    """D_n^+ for n divisible by 8 (n = 16 gives the lattice often named Gamma16)."""
    if n % 8:
        raise ValueError("D_n^+ is even only for n divisible by 8")
    gens = []
    for i in range(n - 1):
        v = [Fraction(0)] * n
        v[i], v[i + 1] = Fraction(1), Fraction(-1)
        gens.append(v)
    v = [Fraction(0)] * n
    v[n - 2] = v[n - 1] = Fraction(1)
    gens.append(v)
    gens.append([Fraction(1, 2)] * n)
    return euclidean_lattice(gens, f"D{n}+")
