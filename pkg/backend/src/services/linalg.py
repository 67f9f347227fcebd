"""Exact integer and rational linear algebra on numpy object arrays.

Every matrix handled here is a ``numpy.ndarray`` with ``dtype=object`` whose
entries are Python ``int`` or ``fractions.Fraction``. Vectors are rows and
matrices act on them from the right, so a basis matrix has one basis vector
per row.
"""
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np


def int_matrix(rows: Iterable[Iterable[int]], ncols: Optional[int] = None) -> np.ndarray:
    """Build an integer object matrix.

    Args:
        rows: Row-major entries
        ncols: Column count, only needed for matrices without rows

    Returns:
        Object array of Python ints
    """
    data = [[int(x) for x in row] for row in rows]
    if not data:
        return np.zeros((0, ncols or 0), dtype=object)
    return np.array(data, dtype=object).reshape(len(data), len(data[0]))


def frac_matrix(rows: Iterable[Iterable], ncols: Optional[int] = None) -> np.ndarray:
    """Build a rational object matrix (entries become ``Fraction``)."""
    data = [[Fraction(x) for x in row] for row in rows]
    if not data:
        return np.zeros((0, ncols or 0), dtype=object)
    return np.array(data, dtype=object).reshape(len(data), len(data[0]))


def identity(n: int) -> np.ndarray:
    """Integer identity matrix."""
    m = np.zeros((n, n), dtype=object)
    for i in range(n):
        m[i, i] = 1
    return m


def zeros(rows: int, cols: int) -> np.ndarray:
    """Integer zero matrix."""
    m = np.empty((rows, cols), dtype=object)
    m.fill(0)
    return m


def vector(values: Iterable) -> np.ndarray:
    """One-dimensional object array."""
    data = list(values)
    out = np.empty(len(data), dtype=object)
    for i, x in enumerate(data):
        out[i] = x
    return out


def denominator(m: np.ndarray) -> int:
    """Least common denominator of all entries."""
    return reduce(lcm, (Fraction(x).denominator for x in m.flat), 1)


def to_int(m: np.ndarray) -> np.ndarray:
    """Convert an integral rational matrix to Python ints.

    Raises:
        ValueError: If an entry is not an integer
    """
    out = np.empty(m.shape, dtype=object)
    for idx, x in np.ndenumerate(m):
        f = Fraction(x)
        if f.denominator != 1:
            raise ValueError(f"entry {f} is not integral")
        out[idx] = f.numerator
    return out


def is_integral(m: np.ndarray) -> bool:
    return all(Fraction(x).denominator == 1 for x in m.flat)


def key(m: np.ndarray) -> Tuple:
    """Hashable canonical key of a matrix or vector."""
    return tuple(Fraction(x) for x in m.flat) + (m.shape,)


# ---------------------------------------------------------------------------
# Rational elimination
# ---------------------------------------------------------------------------


def _row_echelon(m: np.ndarray) -> Tuple[List[List[Fraction]], List[int], int]:
    """Gaussian elimination over Q.

    Returns:
        Echelon rows, pivot columns and the number of row swaps
    """
    rows = [[Fraction(x) for x in row] for row in m]
    ncols = m.shape[1]
    pivots: List[int] = []
    r = 0
    swaps = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            swaps += 1
        piv = rows[r][c]
        for i in range(r + 1, len(rows)):
            if rows[i][c] != 0:
                f = rows[i][c] / piv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots, swaps


def determinant(m: np.ndarray) -> Fraction:
    """Exact determinant of a square rational matrix."""
    n = m.shape[0]
    if n == 0:
        return Fraction(1)
    rows, pivots, swaps = _row_echelon(m)
    if len(pivots) < n:
        return Fraction(0)
    det = Fraction(-1 if swaps % 2 else 1)
    for i in range(n):
        det *= rows[i][i]
    return det


def rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    return len(_row_echelon(m)[1])


def inverse(m: np.ndarray) -> np.ndarray:
    """Exact inverse by Gauss-Jordan elimination.

    Raises:
        ZeroDivisionError: If the matrix is singular
    """
    n = m.shape[0]
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return frac_matrix([row[n:] for row in aug], n)


def rational_left_kernel(m: np.ndarray) -> np.ndarray:
    """Basis (rows) of ``{x : x m = 0}`` over Q."""
    t = m.T
    rows, pivots, _ = _row_echelon(t)
    ncols = t.shape[1]
    # reduce to RREF
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(r):
            if rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -rows[r][fc]
        basis.append(v)
    return frac_matrix(basis, ncols)


def solve_rational(a: np.ndarray, target: Sequence) -> Optional[np.ndarray]:
    """Find some rational ``x`` with ``x a = target``.

    Returns:
        Solution vector or None when the system is inconsistent
    """
    k, n = a.shape
    aug = np.concatenate([a.T, frac_matrix([[t] for t in target], 1)], axis=1)
    rows, pivots, _ = _row_echelon(aug)
    if k in pivots:
        return None
    x = [Fraction(0)] * k
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        s = rows[r][k] - sum(rows[r][j] * x[j] for j in range(c + 1, k))
        x[c] = s / rows[r][c]
    return vector(x)


# ---------------------------------------------------------------------------
# Integer normal forms
# ---------------------------------------------------------------------------


def smith_normal_form(a: np.ndarray) -> Tuple[List[int], np.ndarray, np.ndarray]:
    """Smith normal form with unimodular transforms.

    Clears rows and columns around a minimal pivot and restores the
    divisibility chain by row additions.

    Args:
        a: Integer k x n matrix

    Returns:
        ``(d, s, t)`` with ``s @ a @ t`` diagonal, diagonal entries ``d``
        (length ``min(k, n)``, non-negative, each dividing the next, zeros last)
    """
    k, n = a.shape
    d = to_int(a).copy()
    s = identity(k)
    t = identity(n)
    for p in range(min(k, n)):
        while True:
            best = None
            for i in range(p, k):
                for j in range(p, n):
                    if d[i, j] != 0 and (best is None or abs(d[i, j]) < best[0]):
                        best = (abs(d[i, j]), i, j)
            if best is None:
                return [int(d[i, i]) for i in range(min(k, n))], s, t
            _, i, j = best
            if i != p:
                d[[p, i]] = d[[i, p]]
                s[[p, i]] = s[[i, p]]
            if j != p:
                d[:, [p, j]] = d[:, [j, p]]
                t[:, [p, j]] = t[:, [j, p]]
            piv = d[p, p]
            clean = True
            for i in range(p + 1, k):
                q = d[i, p] // piv
                if q:
                    d[i] = d[i] - q * d[p]
                    s[i] = s[i] - q * s[p]
                if d[i, p] != 0:
                    clean = False
            for j in range(p + 1, n):
                q = d[p, j] // piv
                if q:
                    d[:, j] = d[:, j] - q * d[:, p]
                    t[:, j] = t[:, j] - q * t[:, p]
                if d[p, j] != 0:
                    clean = False
            if not clean:
                continue
            bad = next(
                (i for i in range(p + 1, k) for j in range(p + 1, n) if d[i, j] % piv != 0),
                None,
            )
            if bad is not None:
                d[p] = d[p] + d[bad]
                s[p] = s[p] + s[bad]
                continue
            if piv < 0:
                d[p] = -d[p]
                s[p] = -s[p]
            break
    return [int(d[i, i]) for i in range(min(k, n))], s, t


def unimodular_inverse(u: np.ndarray) -> np.ndarray:
    """Inverse of a unimodular integer matrix, as integers."""
    return to_int(inverse(u))


def row_lattice_basis(generators: np.ndarray) -> np.ndarray:
    """Basis of the integer row lattice spanned by ``generators``.

    Rows of the result are ``d_i * row_i(t^-1)`` for the non-zero Smith
    invariants, so the output has full row rank.
    """
    if generators.shape[0] == 0:
        return zeros(0, generators.shape[1])
    d, _, t = smith_normal_form(generators)
    tinv = unimodular_inverse(t)
    rows = [[d[i] * x for x in tinv[i]] for i in range(len(d)) if d[i] != 0]
    return int_matrix(rows, generators.shape[1])


def rational_row_lattice_basis(generators: np.ndarray) -> np.ndarray:
    """Basis of the group generated by rational rows."""
    den = denominator(generators)
    scaled = to_int(generators * den)
    basis = row_lattice_basis(scaled)
    return frac_matrix([[Fraction(x, den) for x in row] for row in basis], generators.shape[1])


def saturation(basis: np.ndarray) -> np.ndarray:
    """Basis of ``(span_Q basis) ∩ Z^n``."""
    den = denominator(basis)
    scaled = to_int(basis * den)
    d, _, t = smith_normal_form(scaled)
    r = sum(1 for x in d if x != 0)
    tinv = unimodular_inverse(t)
    return tinv[:r].copy()


def integer_left_kernel(a: np.ndarray) -> np.ndarray:
    """Basis (rows) of ``{x in Z^k : x a = 0}``; always saturated."""
    k = a.shape[0]
    if a.shape[1] == 0:
        return identity(k)
    den = denominator(a)
    scaled = to_int(a * den)
    d, s, _ = smith_normal_form(scaled)
    r = sum(1 for x in d if x != 0)
    return s[r:].copy()


def solve_integer(a: np.ndarray, target: Sequence) -> Optional[np.ndarray]:
    """Find an integer ``x`` with ``x a = target``.

    Args:
        a: Integer k x n matrix
        target: Integer (or integral rational) vector of length n

    Returns:
        Some solution, or None when no integer solution exists
    """
    k, n = a.shape
    d, s, t = smith_normal_form(a)
    m = vector([Fraction(x) for x in target]).dot(t)
    y = [Fraction(0)] * k
    for i in range(n):
        di = d[i] if i < len(d) else 0
        if di == 0:
            if m[i] != 0:
                return None
            continue
        yi = Fraction(m[i]) / di
        if yi.denominator != 1:
            return None
        y[i] = yi
    return to_int(vector(y).dot(s))


def hermite_normal_form(generators: np.ndarray) -> np.ndarray:
    """Row-style Hermite normal form of the row lattice of ``generators``.

    Pivots are positive and entries above each pivot are reduced into
    ``[0, pivot)``. Zero rows are dropped, so this is a canonical basis.
    """
    rows = [list(int(x) for x in row) for row in generators]
    ncols = generators.shape[1]
    r = 0
    for c in range(ncols):
        active = [i for i in range(r, len(rows)) if rows[i][c] != 0]
        if not active:
            continue
        while len(active) > 1:
            active.sort(key=lambda i: abs(rows[i][c]))
            piv = active[0]
            for i in active[1:]:
                q = rows[i][c] // rows[piv][c]
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[piv])]
            active = [i for i in active if rows[i][c] != 0]
        piv = active[0]
        rows[r], rows[piv] = rows[piv], rows[r]
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
        for i in range(r):
            q = rows[i][c] // rows[r][c]
            if q:
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
        r += 1
    out = rows[:r]
    return int_matrix(out, ncols)


def primitive_vector(v: Sequence) -> np.ndarray:
    """Divide an integral vector by the gcd of its entries."""
    ints = [int(x) for x in v]
    g = reduce(gcd, ints, 0)
    if g == 0:
        return vector(ints)
    return vector([x // g for x in ints])


def is_primitive_vector(v: Sequence) -> bool:
    return reduce(gcd, (int(x) for x in v), 0) == 1
