"""Genus symbols of even lattices and genus class enumeration.

Local symbols follow the Conway-Sloane convention: a constituent of scale
``q = p^i`` is written ``q^{eps n}``. At p = 2 only completely even lattices
are handled, so every 2-adic constituent is of type II and the symbol is
canonical without sign walking.
"""
import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint, isprime
from sympy.ntheory import legendre_symbol

from ..config import settings
from ..exceptions import FixtureError, GlueError, NotEvenError, UnsupportedError
from ..utils.logger import logger
from . import linalg
from .lattice import Lattice


@dataclass(frozen=True, order=True)
class JordanConstituent:
    """One constituent ``(p^scale)^{sign * rank}`` of a p-adic symbol."""

    scale: int
    rank: int
    sign: int

    def render(self, prime: int) -> str:
        q = prime ** self.scale
        return f"{q}^{'-' if self.sign < 0 else ''}{self.rank}"


@dataclass(frozen=True)
class JordanSymbol:
    """p-adic Jordan symbol with strictly increasing scales."""

    prime: int
    constituents: Tuple[JordanConstituent, ...]

    def __post_init__(self) -> None:
        cons = tuple(sorted(c for c in self.constituents if c.rank > 0))
        object.__setattr__(self, "constituents", cons)

    @property
    def rank(self) -> int:
        return sum(c.rank for c in self.constituents)

    def constituent(self, scale: int) -> Optional[JordanConstituent]:
        return next((c for c in self.constituents if c.scale == scale), None)

    def render(self, include_unimodular: bool = True) -> str:
        """Symbol string such as ``1^2 2^-4``."""
        parts = [c.render(self.prime) for c in self.constituents
                 if include_unimodular or c.scale > 0]
        return " ".join(parts)

    def __str__(self) -> str:
        return self.render()

    def __add__(self, other: "JordanSymbol") -> "JordanSymbol":
        return symbol_direct_sum(self, other)

    @classmethod
    def parse(cls, prime: int, text: str) -> "JordanSymbol":
        """Parse ``"1^-2 2^-2"``-style text for a single prime."""
        cons = []
        for q, neg, n in _TOKEN.findall(text):
            scale = _scale_of(int(q), prime)
            cons.append(JordanConstituent(scale, int(n), -1 if neg else 1))
        return cls(prime, tuple(cons))


_TOKEN = re.compile(r"(\d+)\^(-?)(\d+)")
_HEADER = re.compile(r"^\s*II_\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*(.*)$")


def _scale_of(q: int, prime: int) -> int:
    if q == 1:
        return 0
    f = factorint(q)
    if list(f) != [prime]:
        raise FixtureError(f"scale {q} is not a power of {prime}")
    return f[prime]


def _unit_character(unit: Fraction, p: int) -> int:
    """Legendre symbol of a p-adic unit, or the +-1 mod 8 character at p = 2."""
    x = unit.numerator * unit.denominator
    if p == 2:
        return 1 if x % 8 in (1, 7) else -1
    return legendre_symbol(x % p, p)


@dataclass(frozen=True)
class GenusSymbol:
    """Signature pair plus local symbols at every prime dividing 2 * det."""

    signature: Tuple[int, int]
    local: Tuple[JordanSymbol, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "local", tuple(sorted(self.local, key=lambda s: s.prime)))

    @property
    def rank(self) -> int:
        return sum(self.signature)

    def local_symbol(self, p: int) -> JordanSymbol:
        """Local symbol at p (unimodular for primes not dividing det)."""
        found = next((s for s in self.local if s.prime == p), None)
        if found is not None:
            return found
        eps = _unit_character(Fraction(self.determinant()), p)
        return JordanSymbol(p, (JordanConstituent(0, self.rank, eps),))

    def determinant(self) -> int:
        sign = -1 if self.signature[1] % 2 else 1
        return sign * prod(s.prime ** (c.scale * c.rank) for s in self.local for c in s.constituents)

    def render(self) -> str:
        """Conway-Sloane display string, e.g. ``II_(2,10)2^10``."""
        tokens = [c.render(s.prime) for s in self.local for c in s.constituents if c.scale > 0]
        return f"II_({self.signature[0]},{self.signature[1]})" + " ".join(tokens)

    def __str__(self) -> str:
        return self.render()

    def excess(self, p: int) -> int:
        """p-excess (p odd) or oddity (p = 2) of the local symbol, mod 8."""
        total = 0
        for c in self.local_symbol(p).constituents:
            if p != 2:
                total += c.rank * (p ** c.scale - 1)
            if c.scale % 2 and c.sign < 0:
                total += 4
        return total % 8

    def oddity_formula_holds(self) -> bool:
        """signature + sum of odd p-excesses = oddity (mod 8)."""
        odd = sum(self.excess(s.prime) for s in self.local if s.prime != 2)
        return (self.signature[0] - self.signature[1] + odd - self.excess(2)) % 8 == 0

    def is_valid(self) -> bool:
        """Determinant and sign consistency at every prime plus the oddity formula."""
        det = self.determinant()
        for s in self.local:
            if s.rank != self.rank:
                return False
            if s.prime == 2 and any(c.rank % 2 for c in s.constituents):
                return False
            power = prod(s.prime ** (c.scale * c.rank) for c in s.constituents)
            unit = Fraction(det, power)
            if unit.denominator != 1 or unit.numerator % s.prime == 0:
                return False
            if prod(c.sign for c in s.constituents) != _unit_character(unit, s.prime):
                return False
        return self.oddity_formula_holds()

    @classmethod
    def parse(cls, text: str) -> "GenusSymbol":
        """Parse display text; unimodular constituents are reconstructed.

        Raises:
            FixtureError: If the text is not a genus symbol
        """
        match = _HEADER.match(text)
        if not match:
            raise FixtureError(f"not a genus symbol: {text!r}")
        sig = (int(match.group(1)), int(match.group(2)))
        rank = sum(sig)
        by_prime: Dict[int, List[JordanConstituent]] = {}
        for q, neg, n in _TOKEN.findall(match.group(3)):
            q = int(q)
            f = factorint(q)
            if len(f) != 1:
                raise FixtureError(f"scale {q} is not a prime power")
            (p, e), = f.items()
            by_prime.setdefault(p, []).append(JordanConstituent(e, int(n), -1 if neg else 1))
        by_prime.setdefault(2, [])
        det_sign = -1 if sig[1] % 2 else 1
        det = det_sign * prod(p ** (c.scale * c.rank) for p, cs in by_prime.items() for c in cs)
        local = []
        for p, cs in by_prime.items():
            used = sum(c.rank for c in cs)
            if used > rank:
                raise FixtureError(f"constituent ranks at {p} exceed the rank {rank}")
            if used < rank:
                unit = Fraction(det, prod(p ** (c.scale * c.rank) for c in cs))
                eps = _unit_character(unit, p) * prod(c.sign for c in cs)
                cs = cs + [JordanConstituent(0, rank - used, eps)]
            local.append(JordanSymbol(p, tuple(cs)))
        return cls(sig, tuple(local))


# ---------------------------------------------------------------------------
# Jordan decomposition
# ---------------------------------------------------------------------------


def _valuation(x: Fraction, p: int) -> float:
    if x == 0:
        return float("inf")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _schur(m: List[List[Fraction]], k: int) -> List[List[Fraction]]:
    """Complement of the leading k x k block."""
    n = len(m)
    if k == 1:
        d = m[0][0]
        return [[m[i][j] - m[i][0] * m[0][j] / d for j in range(1, n)] for i in range(1, n)]
    a, b, c = m[0][0], m[0][1], m[1][1]
    det = a * c - b * b
    inv = [[c / det, -b / det], [-b / det, a / det]]
    out = []
    for i in range(2, n):
        row = []
        for j in range(2, n):
            s = m[i][j]
            for x in range(2):
                for y in range(2):
                    s -= m[i][x] * inv[x][y] * m[y][j]
            row.append(s)
        out.append(row)
    return out


def _move_front(m: List[List[Fraction]], idx: Sequence[int]) -> List[List[Fraction]]:
    order = list(idx) + [i for i in range(len(m)) if i not in idx]
    return [[m[i][j] for j in order] for i in order]


def _collect(prime: int, pieces: List[Tuple[int, int, Fraction]]) -> JordanSymbol:
    """Group (scale, rank, unit det) pieces into constituents."""
    grouped: Dict[int, Tuple[int, Fraction]] = {}
    for scale, rank, unit in pieces:
        r, u = grouped.get(scale, (0, Fraction(1)))
        grouped[scale] = (r + rank, u * unit)
    cons = tuple(JordanConstituent(s, r, _unit_character(u, prime)) for s, (r, u) in grouped.items())
    return JordanSymbol(prime, cons)


def jordan_decomposition(lattice: Lattice, p: int) -> JordanSymbol:
    """p-adic Jordan symbol of an integral lattice.

    Args:
        lattice: Integral lattice, even when ``p == 2``
        p: A prime

    Returns:
        The local symbol, unimodular constituent included

    Raises:
        NotEvenError: Non-integral input, or odd input at p = 2
        UnsupportedError: Odd 2-adic constituent
    """
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if not lattice.is_integral():
        raise NotEvenError(f"{lattice!r} is not integral")
    if p == 2 and not lattice.is_even():
        raise NotEvenError(f"{lattice!r} is not even")
    m = [[Fraction(x) for x in row] for row in lattice.gram]
    pieces: List[Tuple[int, int, Fraction]] = []
    while m:
        n = len(m)
        vmin = min(_valuation(m[i][j], p) for i in range(n) for j in range(n))
        diag = next((i for i in range(n) if _valuation(m[i][i], p) == vmin), None)
        if p == 2:
            if diag is not None:
                raise UnsupportedError(
                    f"odd 2-adic constituent of scale 2^{vmin}; only completely even lattices are supported"
                )
            i, j = next((i, j) for i in range(n) for j in range(i + 1, n)
                        if _valuation(m[i][j], 2) == vmin)
            m = _move_front(m, (i, j))
            block_det = m[0][0] * m[1][1] - m[0][1] ** 2
            pieces.append((int(vmin), 2, block_det / Fraction(4) ** int(vmin)))
            m = _schur(m, 2)
            continue
        if diag is None:
            i, j = next((i, j) for i in range(n) for j in range(i + 1, n)
                        if _valuation(m[i][j], p) == vmin)
            # e_i <- e_i + e_j brings the minimal valuation to the diagonal
            for c in range(n):
                m[i][c] += m[j][c]
            for r in range(n):
                m[r][i] += m[r][j]
            diag = i
        m = _move_front(m, (diag,))
        d = m[0][0]
        pieces.append((int(vmin), 1, d / Fraction(p) ** int(vmin)))
        m = _schur(m, 1)
    return _collect(p, pieces)


def genus_symbol(lattice: Lattice) -> GenusSymbol:
    """Genus symbol of an even lattice.

    Raises:
        NotEvenError: If the lattice is not even
        UnsupportedError: If the 2-adic part is not completely even
    """
    if not lattice.is_even():
        raise NotEvenError(f"{lattice!r} is not even")
    det = lattice.determinant()
    primes = sorted(set(factorint(abs(det.numerator))) | {2})
    local = tuple(jordan_decomposition(lattice, p) for p in primes)
    return GenusSymbol(lattice.signature(), local)


# ---------------------------------------------------------------------------
# Symbol calculus
# ---------------------------------------------------------------------------


def symbol_direct_sum(a: JordanSymbol, b: JordanSymbol) -> JordanSymbol:
    """Local symbol of an orthogonal sum: ranks add and signs multiply per scale.

    Raises:
        ValueError: If the primes differ
    """
    if a.prime != b.prime:
        raise ValueError(f"prime mismatch: {a.prime} vs {b.prime}")
    scales = sorted({c.scale for c in a.constituents} | {c.scale for c in b.constituents})
    cons = []
    for s in scales:
        ca, cb = a.constituent(s), b.constituent(s)
        rank = (ca.rank if ca else 0) + (cb.rank if cb else 0)
        sign = (ca.sign if ca else 1) * (cb.sign if cb else 1)
        cons.append(JordanConstituent(s, rank, sign))
    return JordanSymbol(a.prime, tuple(cons))


def symbol_difference(whole: JordanSymbol, part: JordanSymbol) -> Optional[JordanSymbol]:
    """The local symbol B with A + B = ``whole`` for A = ``part``, if one exists."""
    if whole.prime != part.prime:
        return None
    cons = []
    for c in whole.constituents:
        pc = part.constituent(c.scale)
        rank = c.rank - (pc.rank if pc else 0)
        sign = c.sign * (pc.sign if pc else 1)
        if rank < 0 or (rank == 0 and sign < 0) or (whole.prime == 2 and rank % 2):
            return None
        cons.append(JordanConstituent(c.scale, rank, sign))
    if any(whole.constituent(c.scale) is None for c in part.constituents):
        return None
    return JordanSymbol(whole.prime, tuple(cons))


def is_direct_summand(part: JordanSymbol, whole: JordanSymbol) -> bool:
    return symbol_difference(whole, part) is not None


def _scale_partitions(valuation: int, max_rank: int, step: int, scale: int = 1) -> Iterator[Tuple[Tuple[int, int], ...]]:
    """(scale, rank) lists with sum scale*rank = valuation, ranks multiples of ``step``."""
    if valuation == 0:
        yield ()
        return
    if scale > valuation:
        return
    yield from _scale_partitions(valuation, max_rank, step, scale + 1)
    rank = step
    while rank * scale <= valuation and rank <= max_rank:
        for rest in _scale_partitions(valuation - rank * scale, max_rank - rank, step, scale + 1):
            yield ((scale, rank),) + rest
        rank += step


def local_symbols(p: int, rank: int, det: int) -> List[JordanSymbol]:
    """All local symbols at p of even lattices with the given rank and determinant."""
    valuation = factorint(abs(det)).get(p, 0)
    step = 2 if p == 2 else 1
    out = []
    for parts in _scale_partitions(valuation, rank, step):
        rest = rank - sum(r for _, r in parts)
        if p == 2 and rest % 2:
            continue
        unit = Fraction(det, p ** valuation)
        for signs in itertools.product((1, -1), repeat=len(parts)):
            cons = [JordanConstituent(s, r, e) for (s, r), e in zip(parts, signs)]
            eps = _unit_character(unit, p) * prod(signs)
            if rest == 0 and eps < 0:
                continue
            cons.append(JordanConstituent(0, rest, eps))
            out.append(JordanSymbol(p, tuple(cons)))
    return out


def all_genera(signature: Tuple[int, int], det: int) -> List[GenusSymbol]:
    """Every genus of even lattices with the given signature and |det|, sorted by rendering.

    Only completely even 2-adic symbols are produced.
    """
    rank = sum(signature)
    det = (-1 if signature[1] % 2 else 1) * abs(det)
    primes = sorted(set(factorint(abs(det))) | {2})
    found = {}
    for local in itertools.product(*(local_symbols(p, rank, det) for p in primes)):
        symbol = GenusSymbol(signature, tuple(local))
        if symbol.is_valid():
            found[symbol.render()] = symbol
    return [found[k] for k in sorted(found)]


def _delta(p: int) -> int:
    return -1 if p % 4 == 3 else 1


def unimodular_glue_exists(a: JordanSymbol, b: JordanSymbol) -> bool:
    """Check the local condition for gluing A + B into a unimodular lattice.

    For every scale q > 1 the ranks must agree and the signs must satisfy
    ``eps'_q = delta^{n_q} eps_q`` with delta = -1 exactly when p = 3 mod 4.
    """
    if a.prime != b.prime:
        return False
    delta = _delta(a.prime)
    scales = {c.scale for c in a.constituents if c.scale > 0} | {
        c.scale for c in b.constituents if c.scale > 0
    }
    for s in scales:
        ca, cb = a.constituent(s), b.constituent(s)
        if ca is None or cb is None or ca.rank != cb.rank:
            return False
        if cb.sign != delta ** ca.rank * ca.sign:
            return False
    return True


def orthogonal_genus(symbol: GenusSymbol, ambient_signature: Tuple[int, int] = (3, 19)) -> GenusSymbol:
    """Genus of the orthogonal complement of a primitive sublattice of the
    given genus inside an even unimodular lattice of ``ambient_signature``.

    Raises:
        ValueError: If the complement would have negative rank somewhere
    """
    sig = (ambient_signature[0] - symbol.signature[0], ambient_signature[1] - symbol.signature[1])
    if min(sig) < 0:
        raise ValueError(f"{symbol} does not fit into signature {ambient_signature}")
    rank = sum(sig)
    det_sign = -1 if sig[1] % 2 else 1
    det = det_sign * prod(s.prime ** (c.scale * c.rank) for s in symbol.local for c in s.constituents)
    local = []
    for s in symbol.local:
        p = s.prime
        delta = _delta(p) if p != 2 else 1
        cons = [JordanConstituent(c.scale, c.rank, delta ** c.rank * c.sign)
                for c in s.constituents if c.scale > 0]
        rest = rank - sum(c.rank for c in cons)
        if rest < 0:
            raise ValueError(f"complement of {symbol} has rank {rank}, too small at p = {p}")
        unit = det // p ** sum(c.scale * c.rank for c in cons)
        eps = _unit_character(Fraction(unit), p) * prod(c.sign for c in cons)
        cons.append(JordanConstituent(0, rest, eps))
        local.append(JordanSymbol(p, tuple(cons)))
    return GenusSymbol(sig, tuple(local))


def complement_genus(
    ambient: GenusSymbol, part: GenusSymbol, glue_primes: Sequence[int] = ()
) -> Optional[GenusSymbol]:
    """Genus of the orthogonal complement of a primitive sublattice.

    Away from ``glue_primes`` the ambient lattice splits p-adically and the
    complement's symbol is the difference of the two symbols. At a glue
    prime the ambient lattice must be unimodular; the complement then
    carries the part's constituents with the signs changed by delta^rank.

    Returns:
        The complement genus, or None if the symbols are incompatible
    """
    sig = (ambient.signature[0] - part.signature[0], ambient.signature[1] - part.signature[1])
    if min(sig) < 0:
        return None
    rank = sum(sig)
    primes = sorted({s.prime for s in ambient.local} | {s.prime for s in part.local} | {2})
    pieces: Dict[int, List[JordanConstituent]] = {}
    for p in primes:
        whole, sub = ambient.local_symbol(p), part.local_symbol(p)
        if p in glue_primes:
            if any(c.scale > 0 for c in whole.constituents):
                raise GlueError(f"ambient lattice is not unimodular at the glue prime {p}")
            delta = _delta(p) if p != 2 else 1
            pieces[p] = [JordanConstituent(c.scale, c.rank, delta ** c.rank * c.sign)
                         for c in sub.constituents if c.scale > 0]
        else:
            diff = symbol_difference(whole, sub)
            if diff is None:
                return None
            pieces[p] = [c for c in diff.constituents if c.scale > 0]
    det = (-1 if sig[1] % 2 else 1) * prod(p ** (c.scale * c.rank) for p, cs in pieces.items() for c in cs)
    local = []
    for p, cons in pieces.items():
        rest = rank - sum(c.rank for c in cons)
        if rest < 0:
            return None
        unit = Fraction(det, p ** sum(c.scale * c.rank for c in cons))
        eps = _unit_character(unit, p) * prod(c.sign for c in cons)
        if rest == 0 and eps < 0:
            return None
        local.append(JordanSymbol(p, tuple(cons) + (JordanConstituent(0, rest, eps),)))
    symbol = GenusSymbol(sig, tuple(local))
    return symbol if symbol.is_valid() else None


def cyclic_glue_genera(a: Lattice, b: Lattice, p: int) -> List[GenusSymbol]:
    """Genera of the overlattices of A + B glued along a subgroup of order p.

    Elements x, y of order p in the two discriminant groups with
    q(x) + q(y) = 0 mod 2 are paired; every such pairing is tried.
    Sorted by rendering.
    """
    from .lattice import overlattice_from_glue

    qa, qb = a.discriminant_form(), b.discriminant_form()

    def of_order_p(form) -> List[Tuple[int, ...]]:
        return [e for e in form.elements()
                if any(e) and all((p * c) % d == 0 for c, d in zip(e, form.orders))]

    left, right = of_order_p(qa), of_order_p(qb)
    q_right = {y: qb.q(y) for y in right}
    found: Dict[str, GenusSymbol] = {}
    for x in left:
        qx = qa.q(x)
        for y in right:
            if (qx + q_right[y]) % 2 != 0:
                continue
            over = overlattice_from_glue(a, b, [(x, y)])
            symbol = genus_symbol(over.lattice)
            found.setdefault(symbol.render(), symbol)
    return [found[k] for k in sorted(found)]


def phi3_symbol_constraint(symbol: JordanSymbol) -> bool:
    """2-adic condition forced by an isometry of minimal polynomial Phi_3.

    Every constituent must have even rank n and sign (-1)^(n/2).
    """
    return all(c.rank % 2 == 0 and c.sign == (-1) ** (c.rank // 2) for c in symbol.constituents)


# ---------------------------------------------------------------------------
# Definite genus enumeration
# ---------------------------------------------------------------------------


def has_roots(lattice: Lattice) -> bool:
    """True if a definite lattice has vectors of norm +-2.

    Raises:
        UnsupportedError: If the lattice is indefinite
    """
    from .enumeration import short_vectors

    s_plus, s_minus = lattice.signature()
    if s_plus and s_minus:
        raise UnsupportedError("has_roots needs a definite lattice")
    target = 2 if s_minus == 0 else -2
    return bool(short_vectors(lattice, target))


def _smallest_good_prime(det: int) -> int:
    p = 3
    while det % p == 0 or not isprime(p):
        p += 2
    return p


def _projective_points(n: int, p: int) -> Iterator[Tuple[int, ...]]:
    """Representatives of lines in F_p^n (first non-zero coordinate 1)."""
    for lead in range(n):
        for tail in itertools.product(range(p), repeat=n - lead - 1):
            yield (0,) * lead + (1,) + tail


def isotropic_lines(lattice: Lattice, p: int) -> Iterator[np.ndarray]:
    """Vectors spanning the lines v mod p with v.v = 0 mod p."""
    g = lattice.int_gram
    for v in _projective_points(lattice.rank, p):
        vec = linalg.vector(v)
        if vec.dot(g).dot(vec) % p == 0:
            yield vec


def neighbor(lattice: Lattice, v: Sequence[int], p: int) -> Lattice:
    """Kneser p-neighbor of an even lattice at an odd prime not dividing det.

    Args:
        lattice: Even lattice
        v: Vector with v.v = 0 mod p and v not in pL
        p: Odd prime with p not dividing det

    Returns:
        The neighbor L_v + Z v/p in an integral basis
    """
    g = lattice.int_gram
    n = lattice.rank
    v = linalg.vector([int(x) for x in v])
    pair = v.dot(g)
    k = next((i for i in range(n) if pair[i] % p), None)
    if k is None:
        raise ValueError("v pairs trivially with L mod p")
    vv = v.dot(g).dot(v)
    if vv % p:
        raise ValueError("v is not isotropic mod p")
    # lift so that v.v = 0 mod p^2
    c = (-(vv // p) * pow(2 * int(pair[k]), -1, p)) % p
    v = v.copy()
    v[k] += p * c
    pair = v.dot(g)
    inv = pow(int(pair[k]) % p, -1, p)
    rows = []
    for i in range(n):
        if i == k:
            continue
        row = [0] * n
        row[i] = 1
        row[k] = -(int(pair[i]) * inv) % p
        rows.append([Fraction(x) for x in row])
    row = [0] * n
    row[k] = p
    rows.append([Fraction(x) for x in row])
    rows.append([Fraction(int(x), p) for x in v])
    basis = linalg.rational_row_lattice_basis(linalg.frac_matrix(rows, n))
    return lattice.transform(basis)


def enumerate_definite_genus(lattice: Lattice, prime: Optional[int] = None) -> List[Lattice]:
    """Isometry classes reachable from ``lattice`` by iterated p-neighbors.

    Args:
        lattice: Even definite lattice
        prime: Neighbor prime; defaults to the configured one or the smallest
            odd prime not dividing det

    Returns:
        Class representatives, the input first

    Raises:
        UnsupportedError: If the lattice is indefinite
    """
    from .enumeration import lll_reduce_lattice, theta_prefix
    from .isometries import isometry_test

    s_plus, s_minus = lattice.signature()
    if s_plus and s_minus:
        raise UnsupportedError("genus enumeration needs a definite lattice")
    if not lattice.is_even():
        raise NotEvenError(f"{lattice!r} is not even")
    sign = -1 if s_plus == 0 else 1
    start = lattice.rescale(sign) if sign < 0 else lattice
    det = int(abs(start.determinant()))
    p = prime or settings.neighbor_prime or _smallest_good_prime(det)
    if det % p == 0 or p == 2:
        raise ValueError(f"neighbor prime {p} must be odd and coprime to det {det}")

    logger.warning(
        "genus enumeration uses neighbor closure; it equals the genus when the spinor genus is the genus"
    )
    start = lll_reduce_lattice(start)
    classes: List[Lattice] = [start]
    invariants = [theta_prefix(start)]
    seen_grams = {start: 0}
    queue = [start]
    while queue:
        current = queue.pop(0)
        for v in isotropic_lines(current, p):
            candidate = lll_reduce_lattice(neighbor(current, v, p))
            if candidate in seen_grams:
                continue
            inv = theta_prefix(candidate)
            match = None
            for idx, (cls, cls_inv) in enumerate(zip(classes, invariants)):
                if cls_inv == inv and isometry_test(cls, candidate) is not None:
                    match = idx
                    break
            if match is None:
                logger.info(f"new class #{len(classes) + 1} in genus (det {det}) via {p}-neighbor")
                classes.append(candidate)
                invariants.append(inv)
                queue.append(candidate)
                match = len(classes) - 1
            seen_grams[candidate] = match
    if sign < 0:
        return [c.rescale(-1) for c in classes]
    return classes


def find_sublattice_in_genus(
    lattice: Lattice, target: GenusSymbol, p: int = 2, codim: int = 1
) -> Optional[Lattice]:
    """Search the index p^codim sublattices {x : x C = 0 mod p} for one in ``target``.

    Args:
        lattice: Even seed lattice
        target: Genus the sublattice must belong to
        p: Prime of the index
        codim: Dimension of the functional space C over F_p

    Returns:
        A sublattice Gram in the target genus, or None
    """
    n = lattice.rank
    seen = set()
    points = list(_projective_points(n, p))
    for combo in itertools.combinations(points, codim):
        c = linalg.int_matrix(combo, n).T
        span = _span_mod(combo, p)
        if len(span) != p ** codim or span in seen:
            continue
        seen.add(span)
        stacked = np.concatenate([c, -p * linalg.identity(codim)], axis=0)
        kernel = linalg.integer_left_kernel(stacked)[:, :n]
        basis = linalg.row_lattice_basis(kernel)
        sub = lattice.transform(basis)
        try:
            if genus_symbol(sub) == target:
                return sub
        except UnsupportedError:
            continue
    return None


def _span_mod(vectors: Sequence[Tuple[int, ...]], p: int) -> frozenset:
    out = set()
    for coeffs in itertools.product(range(p), repeat=len(vectors)):
        out.add(tuple(sum(a * v[i] for a, v in zip(coeffs, vectors)) % p for i in range(len(vectors[0]))))
    return frozenset(out)
