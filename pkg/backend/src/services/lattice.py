"""Lattices, sublattices, discriminant forms and overlattices."""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import DegenerateLatticeError, GlueError, NotEvenError
from ..utils.logger import logger
from . import linalg


def _congruence_signs(gram: np.ndarray) -> Tuple[int, int, int]:
    """Diagonalize a symmetric matrix by congruence and count signs.

    Returns:
        (positive, negative, zero) counts
    """
    m = [[Fraction(x) for x in row] for row in gram]
    n = len(m)
    pos = neg = 0
    for k in range(n):
        p = next((i for i in range(k, n) if m[i][i] != 0), None)
        if p is None:
            pair = next(
                ((i, j) for i in range(k, n) for j in range(i + 1, n) if m[i][j] != 0),
                None,
            )
            if pair is None:
                break
            i, j = pair
            # e_i <- e_i + e_j turns the diagonal entry into 2 m[i][j]
            for c in range(n):
                m[i][c] += m[j][c]
            for r in range(n):
                m[r][i] += m[r][j]
            p = i
        m[k], m[p] = m[p], m[k]
        for row in m:
            row[k], row[p] = row[p], row[k]
        piv = m[k][k]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            if m[i][k] == 0:
                continue
            f = m[i][k] / piv
            for j in range(k + 1, n):
                m[i][j] -= f * m[k][j]
        for i in range(k + 1, n):
            m[i][k] = m[k][i] = Fraction(0)
    return pos, neg, n - pos - neg


@dataclass(frozen=True, eq=False)
class Lattice:
    """A free Z-module with a symmetric non-degenerate rational Gram matrix.

    Rank zero is allowed and acts as the neutral element for direct sums.
    """

    gram: np.ndarray
    name: Optional[str] = None

    def __post_init__(self) -> None:
        raw = np.asarray(self.gram, dtype=object)
        if raw.size == 0:
            raw = linalg.zeros(0, 0)
        if raw.ndim != 2:
            raise DegenerateLatticeError("Gram matrix must be two-dimensional")
        g = linalg.frac_matrix(raw, raw.shape[1])
        if g.shape[0] != g.shape[1]:
            raise DegenerateLatticeError(f"Gram matrix must be square, got {g.shape}")
        if any(g[i, j] != g[j, i] for i in range(g.shape[0]) for j in range(i)):
            raise DegenerateLatticeError("Gram matrix is not symmetric")
        if g.shape[0] and linalg.determinant(g) == 0:
            raise DegenerateLatticeError("Gram matrix is singular")
        g.flags.writeable = False
        object.__setattr__(self, "gram", g)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], name: Optional[str] = None) -> "Lattice":
        rows = [list(r) for r in rows]
        return cls(linalg.frac_matrix(rows, len(rows)), name)

    @classmethod
    def zero(cls) -> "Lattice":
        return cls(linalg.zeros(0, 0), "0")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Lattice) and linalg.key(self.gram) == linalg.key(other.gram)

    def __hash__(self) -> int:
        return hash(linalg.key(self.gram))

    def __repr__(self) -> str:
        label = self.name or "Lattice"
        return f"{label}(rank={self.rank}, det={self.determinant()})"

    # -- basic invariants -------------------------------------------------

    @property
    def rank(self) -> int:
        return self.gram.shape[0]

    def determinant(self) -> Fraction:
        """Determinant of the Gram matrix."""
        return linalg.determinant(self.gram)

    def is_integral(self) -> bool:
        return linalg.is_integral(self.gram)

    def is_even(self) -> bool:
        return self.is_integral() and all(self.gram[i, i].numerator % 2 == 0 for i in range(self.rank))

    def is_unimodular(self) -> bool:
        return self.is_integral() and abs(self.determinant()) == 1

    @cached_property
    def int_gram(self) -> np.ndarray:
        """Gram matrix as Python ints.

        Raises:
            NotEvenError: If the lattice is not integral
        """
        if not self.is_integral():
            raise NotEvenError(f"{self!r} is not integral")
        return linalg.to_int(self.gram)

    def signature(self) -> Tuple[int, int]:
        """Signature pair (s_plus, s_minus)."""
        pos, neg, zero = _congruence_signs(self.gram)
        if zero:
            raise DegenerateLatticeError("degenerate Gram matrix has no signature")
        return pos, neg

    def is_definite(self) -> bool:
        s_plus, s_minus = self.signature()
        return s_plus == 0 or s_minus == 0

    def is_negative_definite(self) -> bool:
        return self.signature()[0] == 0

    # -- products ---------------------------------------------------------

    def product(self, x: Sequence, y: Sequence) -> Fraction:
        return Fraction(linalg.vector(x).dot(self.gram).dot(linalg.vector(y)))

    def norm(self, x: Sequence) -> Fraction:
        return self.product(x, x)

    def pairings(self, x: Sequence) -> np.ndarray:
        """Row vector x G (pairings of x with the basis)."""
        return linalg.vector(x).dot(self.gram)

    # -- constructions ----------------------------------------------------

    def rescale(self, r) -> "Lattice":
        """Return L(r), the same module with Gram scaled by r.

        Raises:
            DegenerateLatticeError: If r is zero
        """
        r = Fraction(r)
        if r == 0:
            raise DegenerateLatticeError("cannot rescale by zero")
        name = f"{self.name}({r})" if self.name else None
        return Lattice(self.gram * r, name)

    def direct_sum(self, other: "Lattice") -> "Lattice":
        """Orthogonal direct sum with block-diagonal Gram."""
        n, m = self.rank, other.rank
        g = linalg.zeros(n + m, n + m)
        g[:n, :n] = self.gram
        g[n:, n:] = other.gram
        names = [x for x in (self.name, other.name) if x and x != "0"]
        return Lattice(g, " + ".join(names) or None)

    def dual(self) -> "Lattice":
        """Dual lattice in the dual basis (Gram matrix inverse)."""
        if self.rank == 0:
            return self
        return Lattice(linalg.inverse(self.gram), f"{self.name}^dual" if self.name else None)

    def transform(self, basis: np.ndarray) -> "Lattice":
        """Lattice spanned by rational combinations ``basis`` of this basis."""
        b = linalg.frac_matrix(basis, self.rank)
        return Lattice(b.dot(self.gram).dot(b.T))

    def discriminant_form(self) -> "TorsionQuadraticForm":
        """Discriminant group L^dual / L with its Q/2Z quadratic form.

        Raises:
            NotEvenError: If the lattice is not even
        """
        if not self.is_even():
            raise NotEvenError(f"{self!r} is not even")
        return TorsionQuadraticForm.of(self)

    def sublattice(self, basis) -> "Sublattice":
        return Sublattice(self, linalg.int_matrix(basis, self.rank))


def direct_sum(*lattices: Lattice) -> Lattice:
    """Direct sum of any number of lattices."""
    out = Lattice.zero()
    for lat in lattices:
        out = out.direct_sum(lat)
    return out


@dataclass(frozen=True, eq=False)
class Sublattice:
    """A sublattice given by integer coordinates of its basis in the ambient basis."""

    ambient: Lattice
    basis: np.ndarray

    def __post_init__(self) -> None:
        b = linalg.int_matrix(self.basis, self.ambient.rank)
        if b.shape[1] != self.ambient.rank:
            raise DegenerateLatticeError("basis width does not match the ambient rank")
        if linalg.rank(b) != b.shape[0]:
            raise DegenerateLatticeError("sublattice basis rows are dependent")
        object.__setattr__(self, "basis", b)

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    @cached_property
    def lattice(self) -> Lattice:
        """Induced lattice basis . G . basis^T."""
        return Lattice(self.basis.dot(self.ambient.gram).dot(self.basis.T))

    @cached_property
    def canonical_basis(self) -> np.ndarray:
        """Hermite normal form of the basis, the equality canon."""
        return linalg.hermite_normal_form(self.basis)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Sublattice)
            and other.ambient == self.ambient
            and linalg.key(other.canonical_basis) == linalg.key(self.canonical_basis)
        )

    def __hash__(self) -> int:
        return hash(linalg.key(self.canonical_basis))

    def primitive_closure(self) -> "Sublattice":
        return Sublattice(self.ambient, linalg.saturation(self.basis))

    def is_primitive(self) -> bool:
        return self.index_in_closure() == 1

    def index_in_closure(self) -> int:
        """Index [closure : self]."""
        closure = self.primitive_closure()
        coords = self.coordinates_in(closure)
        return abs(int(linalg.determinant(coords)))

    def coordinates_in(self, other: "Sublattice") -> np.ndarray:
        """Coordinates of this basis in the basis of ``other`` (rational)."""
        rows = []
        for v in self.basis:
            x = linalg.solve_rational(other.basis, v)
            if x is None:
                raise ValueError("sublattice is not contained in the span of the other")
            rows.append(list(x))
        return linalg.frac_matrix(rows, other.rank)

    def orthogonal_complement(self) -> "Sublattice":
        """Primitive sublattice {x in ambient : b(x, S) = 0}."""
        pair = self.ambient.gram.dot(self.basis.T)
        return Sublattice(self.ambient, linalg.integer_left_kernel(pair))

    def contains(self, v: Sequence) -> bool:
        x = linalg.solve_rational(self.basis, v)
        return x is not None and all(Fraction(c).denominator == 1 for c in x)


@dataclass(frozen=True, eq=False)
class TorsionQuadraticForm:
    """Finite quadratic form on the discriminant group of an even lattice.

    Generator ``i`` is the dual vector ``generators[i]`` (coordinates in the
    lattice basis) of order ``orders[i]``; orders form a divisibility chain.
    """

    orders: Tuple[int, ...]
    generators: np.ndarray = field(repr=False)
    lattice: Lattice = field(repr=False)
    coordinate_map: np.ndarray = field(repr=False)

    @classmethod
    def of(cls, lattice: Lattice) -> "TorsionQuadraticForm":
        g = lattice.int_gram
        d, s, t = linalg.smith_normal_form(g)
        keep = [i for i, di in enumerate(d) if di > 1]
        gens = linalg.frac_matrix(
            [[Fraction(int(x), d[i]) for x in s[i]] for i in keep], lattice.rank
        )
        coordinate_map = t[:, keep] if keep else linalg.zeros(lattice.rank, 0)
        return cls(tuple(d[i] for i in keep), gens, lattice, coordinate_map)

    @property
    def order(self) -> int:
        out = 1
        for d in self.orders:
            out *= d
        return out

    @property
    def length(self) -> int:
        return len(self.orders)

    def vector_of(self, element: Sequence[int]) -> np.ndarray:
        """Dual vector representing the element with the given coordinates."""
        v = linalg.vector([Fraction(0)] * self.lattice.rank)
        for c, g in zip(element, self.generators):
            v = v + int(c) * g
        return v

    def coordinates(self, v: Sequence) -> Tuple[int, ...]:
        """Coordinates of the class of a dual vector."""
        w = linalg.vector(v).dot(self.lattice.gram).dot(self.coordinate_map)
        out = []
        for x, d in zip(w, self.orders):
            f = Fraction(x)
            if f.denominator != 1:
                raise ValueError("vector is not in the dual lattice")
            out.append(f.numerator % d)
        return tuple(out)

    def q(self, element: Sequence[int]) -> Fraction:
        """Quadratic form value in Q/2Z."""
        v = self.vector_of(element)
        return self.lattice.norm(v) % 2

    def b(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        """Bilinear form value in Q/Z."""
        return self.lattice.product(self.vector_of(x), self.vector_of(y)) % 1

    @property
    def q_values(self) -> Tuple[Fraction, ...]:
        return tuple(self.q(self._unit(i)) for i in range(self.length))

    @property
    def b_matrix(self) -> List[List[Fraction]]:
        return [[self.b(self._unit(i), self._unit(j)) for j in range(self.length)]
                for i in range(self.length)]

    def _unit(self, i: int) -> Tuple[int, ...]:
        return tuple(int(i == j) for j in range(self.length))

    def elements(self) -> List[Tuple[int, ...]]:
        """All elements as coordinate tuples."""
        out: List[Tuple[int, ...]] = [()]
        for d in self.orders:
            out = [e + (c,) for e in out for c in range(d)]
        return out

    def is_isotropic(self, elements: Iterable[Sequence[int]]) -> bool:
        """True if the given elements generate an isotropic subgroup."""
        elems = list(elements)
        if any(self.q(e) != 0 for e in elems):
            return False
        return all(self.b(x, y) == 0 for i, x in enumerate(elems) for y in elems[i + 1:])


@dataclass(frozen=True, eq=False)
class Overlattice:
    """Overlattice C of A + B obtained from an isotropic glue subgroup."""

    lattice: Lattice
    basis: np.ndarray = field(repr=False)
    index: int
    left: Lattice = field(repr=False)
    right: Lattice = field(repr=False)

    def determinant_identity(self) -> bool:
        """det A * det B == [C : A + B]^2 * det C."""
        return (self.left.determinant() * self.right.determinant()
                == self.index ** 2 * self.lattice.determinant())

    def determinant_divisibility(self) -> bool:
        """det A divides [C : A + B] * det C."""
        ratio = Fraction(self.index) * self.lattice.determinant() / self.left.determinant()
        return ratio.denominator == 1


def overlattice_from_glue(
    a: Lattice,
    b: Lattice,
    glue: Iterable[Tuple[Sequence[int], Sequence[int]]],
) -> Overlattice:
    """Glue A + B along a subgroup of the sum of their discriminant forms.

    Args:
        a: Even lattice A
        b: Even lattice B
        glue: Generators of the glue subgroup, each a pair of coordinate
            tuples in the discriminant forms of A and B

    Returns:
        The overlattice with its rational basis in A + B coordinates

    Raises:
        GlueError: If the glue is not isotropic
    """
    qa, qb = a.discriminant_form(), b.discriminant_form()
    total = a.direct_sum(b)
    vectors = []
    for ea, eb in glue:
        vectors.append(list(qa.vector_of(ea)) + list(qb.vector_of(eb)))
    return overlattice_from_vectors(a, b, vectors, total)


def overlattice_from_vectors(
    a: Lattice,
    b: Lattice,
    vectors: Sequence[Sequence],
    total: Optional[Lattice] = None,
) -> Overlattice:
    """Overlattice of A + B generated by extra rational glue vectors."""
    total = total or a.direct_sum(b)
    n = total.rank
    for i, v in enumerate(vectors):
        if total.norm(v) % 2 != 0:
            raise GlueError(f"glue vector {i} has q = {total.norm(v) % 2} != 0 mod 2")
        for w in vectors[i + 1:]:
            if total.product(v, w) % 1 != 0:
                raise GlueError("glue vectors are not orthogonal mod 1")
    gens = linalg.frac_matrix(
        [[int(i == j) for j in range(n)] for i in range(n)] + [list(v) for v in vectors], n
    )
    basis = linalg.rational_row_lattice_basis(gens)
    over = total.transform(basis)
    index = abs(int(1 / linalg.determinant(basis)))
    if not over.is_even():
        raise GlueError("glued lattice is not even")
    logger.debug(f"overlattice of index {index} with det {over.determinant()}")
    return Overlattice(over, basis, index, a, b)


@dataclass(frozen=True)
class PrimitiveExtensionReport:
    """Index and determinant relations of a primitive extension A + B in C."""

    index: int
    det_left: Fraction
    det_right: Fraction
    det_over: Fraction
    identity_holds: bool
    divisibility_holds: bool


def primitive_extension_report(over: Overlattice) -> PrimitiveExtensionReport:
    return PrimitiveExtensionReport(
        over.index,
        over.left.determinant(),
        over.right.determinant(),
        over.lattice.determinant(),
        over.determinant_identity(),
        over.determinant_divisibility(),
    )


def anti_isometry(
    first: TorsionQuadraticForm, second: TorsionQuadraticForm
) -> Optional[List[Tuple[int, ...]]]:
    """Images of the generators of ``first`` under some phi with q2(phi x) = -q1(x).

    Only p-elementary forms of equal order are handled. Images are chosen
    generator by generator with backtracking.

    Returns:
        Coordinate tuples in ``second``, or None if the forms are not anti-isometric
    """
    if first.orders != second.orders:
        return None
    if len(set(first.orders)) > 1:
        raise GlueError("anti-isometry search needs p-elementary discriminant forms")
    n = first.length
    p = first.orders[0] if n else 1
    units = [first._unit(i) for i in range(n)]
    q1 = [first.q(u) for u in units]
    b1 = [[first.b(units[i], units[j]) for j in range(n)] for i in range(n)]
    pool = [e for e in second.elements() if any(e)]
    q2 = {e: second.q(e) for e in pool}

    def span(images: List[Tuple[int, ...]]) -> set:
        out = {tuple([0] * n)}
        for img in images:
            out = {tuple((x + c * y) % p for x, y in zip(e, img)) for e in out for c in range(p)}
        return out

    def extend(images: List[Tuple[int, ...]]) -> Optional[List[Tuple[int, ...]]]:
        i = len(images)
        if i == n:
            return list(images)
        taken = span(images)
        for e in pool:
            if e in taken or (q2[e] + q1[i]) % 2 != 0:
                continue
            if any((second.b(e, images[j]) + b1[i][j]) % 1 != 0 for j in range(i)):
                continue
            found = extend(images + [e])
            if found is not None:
                return found
        return None

    return extend([])
