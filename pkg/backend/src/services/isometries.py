"""Isometries, finite orthogonal groups and their discriminant and mod-2 actions.

Matrices act on row vectors from the right: ``g`` maps ``x`` to ``x g`` and
preserves a Gram matrix when ``g G g^T == G``. A product ``g h`` applies
``g`` first.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import sympy.combinatorics as comb

from ..exceptions import UnsupportedError
from ..utils.logger import logger
from . import linalg
from .enumeration import close_vectors, lll_reduce
from .lattice import Lattice, Overlattice, TorsionQuadraticForm


def preserves(g: np.ndarray, gram: np.ndarray) -> bool:
    return linalg.key(g.dot(gram).dot(g.T)) == linalg.key(linalg.frac_matrix(gram, gram.shape[0]))


@dataclass(frozen=True, eq=False)
class Isometry:
    """An integer matrix preserving the Gram matrix of ``lattice``."""

    matrix: np.ndarray
    lattice: Lattice = field(repr=False)

    def __post_init__(self) -> None:
        m = linalg.to_int(np.asarray(self.matrix, dtype=object))
        if m.shape != (self.lattice.rank, self.lattice.rank):
            raise ValueError("isometry matrix has the wrong shape")
        if not preserves(m, self.lattice.gram):
            raise ValueError("matrix does not preserve the Gram matrix")
        object.__setattr__(self, "matrix", m)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Isometry) and linalg.key(self.matrix) == linalg.key(other.matrix)

    def __hash__(self) -> int:
        return hash(linalg.key(self.matrix))

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry(self.matrix.dot(other.matrix), self.lattice)

    def inverse(self) -> "Isometry":
        return Isometry(linalg.unimodular_inverse(self.matrix), self.lattice)

    def apply(self, v: Sequence) -> np.ndarray:
        return linalg.vector(v).dot(self.matrix)

    @property
    def is_identity(self) -> bool:
        return linalg.key(self.matrix) == linalg.key(linalg.identity(self.lattice.rank))

    def order(self, limit: int = 10000) -> int:
        """Multiplicative order, or 0 if larger than ``limit``."""
        p = self.matrix
        one = linalg.key(linalg.identity(self.lattice.rank))
        for k in range(1, limit + 1):
            if linalg.key(p) == one:
                return k
            p = p.dot(self.matrix)
        return 0


def reflection(lattice: Lattice, r: Sequence) -> Isometry:
    """Reflection x -> x - 2<x,r>/<r,r> r in a root r.

    Raises:
        ValueError: If <r,r> is not +-2
    """
    r = linalg.vector(r)
    rr = lattice.norm(r)
    if rr not in (2, -2):
        raise ValueError(f"reflection needs a root of norm -2 or 2, got {rr}")
    pr = lattice.pairings(r)
    n = lattice.rank
    rows = [[int(i == j) - 2 * pr[i] * r[j] / rr for j in range(n)] for i in range(n)]
    return Isometry(linalg.frac_matrix(rows, n), lattice)


# ---------------------------------------------------------------------------
# Basis image search
# ---------------------------------------------------------------------------


class _BasisImageSearch:
    """Backtracking over images of a basis among a finite vector set.

    ``source`` is the Gram matrix of the basis to map; ``vectors`` are
    candidates in the target lattice with Gram ``target``.
    """

    def __init__(self, source: np.ndarray, target: np.ndarray, vectors: List[np.ndarray]):
        self.n = source.shape[0]
        self.source = [[Fraction(x) for x in row] for row in source]
        self.vectors = vectors
        pv = [v.dot(target) for v in vectors]
        self.pairing = [[Fraction(p.dot(w)) for w in vectors] for p in pv]
        self.candidates = [
            [j for j in range(len(vectors)) if self.pairing[j][j] == self.source[i][i]]
            for i in range(self.n)
        ]

    def compatible(self, images: Sequence[int], i: int, c: int) -> bool:
        row = self.pairing[c]
        return all(row[images[j]] == self.source[i][j] for j in range(i))

    def extensions(self, fixed: Sequence[int]) -> Iterator[List[int]]:
        """All completions of a partial image list, depth first."""
        images = list(fixed)
        for i in range(len(images)):
            if not self.compatible(images, i, images[i]):
                return
        yield from self._extend(images)

    def _extend(self, images: List[int]) -> Iterator[List[int]]:
        i = len(images)
        if i == self.n:
            yield list(images)
            return
        for c in self.candidates[i]:
            if self.compatible(images, i, c):
                images.append(c)
                yield from self._extend(images)
                images.pop()

    def first(self, fixed: Sequence[int]) -> Optional[List[int]]:
        return next(self.extensions(fixed), None)


def _definite_frame(lattice: Lattice) -> Tuple[int, np.ndarray, np.ndarray]:
    """(sign, U, reduced) with sign*G positive definite and U LLL-reducing it."""
    s_plus, s_minus = lattice.signature()
    if s_plus and s_minus:
        raise UnsupportedError("orthogonal groups are only computed for definite lattices")
    sign = -1 if s_plus == 0 else 1
    u, reduced = lll_reduce(lattice.gram * sign)
    return sign, u, reduced


def _vectors_with_norms(gram: np.ndarray, norms: Sequence[Fraction]) -> List[np.ndarray]:
    wanted = set(norms)
    out = []
    for v in close_vectors(gram, [0] * gram.shape[0], max(wanted)):
        if any(v) and Fraction(v.dot(gram).dot(v)) in wanted:
            out.append(v)
    return out


# ---------------------------------------------------------------------------
# Finite groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteMatrixGroup:
    """Finite group of isometries given by generators and a certified order.

    ``domain`` is a finite generating set of vectors permuted faithfully by
    the group and ``frame`` the rows of a basis inside it (as indices),
    which lets permutations be turned back into matrices.
    """

    lattice: Lattice = field(repr=False)
    generators: Tuple[np.ndarray, ...] = field(repr=False)
    order: int
    domain: Tuple[np.ndarray, ...] = field(default=(), repr=False)
    frame: Tuple[int, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        for g in self.generators:
            if not preserves(g, self.lattice.gram):
                raise ValueError("group generator does not preserve the Gram matrix")

    @property
    def isometries(self) -> List[Isometry]:
        return [Isometry(g, self.lattice) for g in self.generators]

    def _index(self) -> Dict[Tuple, int]:
        return {linalg.key(v): i for i, v in enumerate(self.domain)}

    def permutation(self, g: np.ndarray) -> List[int]:
        """Permutation of ``domain`` induced by the matrix g."""
        index = self._index()
        return [index[linalg.key(v.dot(g))] for v in self.domain]

    def matrix_of(self, perm: Sequence[int]) -> np.ndarray:
        """Matrix of the group element acting on ``domain`` as ``perm``."""
        frame = linalg.frac_matrix([self.domain[i] for i in self.frame], self.lattice.rank)
        images = linalg.frac_matrix([self.domain[perm[i]] for i in self.frame], self.lattice.rank)
        return linalg.to_int(linalg.inverse(frame).dot(images))

    def elements(self, limit: int = 200000) -> List[np.ndarray]:
        """All elements by closure (small groups only)."""
        if self.order > limit:
            raise UnsupportedError(f"group of order {self.order} is too large to list")
        ident = linalg.identity(self.lattice.rank)
        seen = {linalg.key(ident): ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = x.dot(g)
                    k = linalg.key(y)
                    if k not in seen:
                        seen[k] = y
                        nxt.append(y)
            frontier = nxt
        return sorted(seen.values(), key=linalg.key)


def _orbit(start: int, perms: Sequence[Sequence[int]]) -> set:
    orbit = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for p in perms:
            y = p[x]
            if y not in orbit:
                orbit.add(y)
                stack.append(y)
    return orbit


def definite_orthogonal_group(lattice: Lattice) -> FiniteMatrixGroup:
    """Generators and exact order of O(L) for a definite lattice.

    Images of an LLL-reduced basis are searched among vectors of matching
    norms; the order is the product of basic orbit lengths of the
    stabilizer chain of that basis.

    Raises:
        UnsupportedError: If the lattice is indefinite
    """
    n = lattice.rank
    sign, u, reduced = _definite_frame(lattice)
    vectors = _vectors_with_norms(reduced, [reduced[i, i] for i in range(n)])
    index = {linalg.key(v): i for i, v in enumerate(vectors)}
    basis = [index[linalg.key(linalg.identity(n)[i])] for i in range(n)]
    search = _BasisImageSearch(reduced, reduced, vectors)

    def perm_of(g: np.ndarray) -> List[int]:
        return [index[linalg.key(v.dot(g))] for v in vectors]

    gens: List[np.ndarray] = []
    perms: List[List[int]] = []
    order = 1
    for level in reversed(range(n)):
        fixed = basis[:level]
        orbit = _orbit(basis[level], perms)
        for c in search.candidates[level]:
            if c in orbit or not search.compatible(fixed + [c], level, c):
                continue
            images = search.first(fixed + [c])
            if images is None:
                continue
            g = linalg.int_matrix([vectors[i] for i in images], n)
            gens.append(g)
            perms.append(perm_of(g))
            orbit = _orbit(basis[level], perms)
        order *= len(orbit)
        logger.debug(f"O(L) chain level {level}: orbit length {len(orbit)}")
    uinv = linalg.unimodular_inverse(u)
    originals = tuple(uinv.dot(g).dot(u) for g in gens)
    domain = tuple(v.dot(u) for v in vectors)
    logger.info(f"orthogonal group of {lattice.name or 'lattice'}: order {order}, {len(gens)} generators")
    return FiniteMatrixGroup(lattice, originals, order, domain, tuple(basis))


def isometry_test(first: Lattice, second: Lattice) -> Optional[np.ndarray]:
    """An integer matrix g with g G2 g^T = G1, or None.

    Rows of g are the images of the basis of ``first`` written in the basis
    of ``second``.

    Raises:
        UnsupportedError: If either lattice is indefinite
    """
    if first.rank != second.rank:
        return None
    if first.rank == 0:
        return linalg.identity(0)
    sign1, u1, red1 = _definite_frame(first)
    sign2, u2, red2 = _definite_frame(second)
    if sign1 != sign2 or first.determinant() != second.determinant():
        return None
    n = first.rank
    norms = [red1[i, i] for i in range(n)]
    vectors = _vectors_with_norms(red2, norms)
    images = _BasisImageSearch(red1, red2, vectors).first([])
    if images is None:
        return None
    g = linalg.int_matrix([vectors[i] for i in images], n)
    return linalg.unimodular_inverse(u1).dot(g).dot(u2)


def configuration_automorphisms(lattice: Lattice, vectors: Sequence[Sequence]) -> List[np.ndarray]:
    """All isometries of L permuting a finite spanning set of vectors.

    Raises:
        ValueError: If the vectors do not span L tensor Q
    """
    vecs = [linalg.vector(v) for v in vectors]
    n = lattice.rank
    frame: List[int] = []
    for i, v in enumerate(vecs):
        trial = linalg.frac_matrix([vecs[j] for j in frame] + [v], n)
        if linalg.rank(trial) == len(frame) + 1:
            frame.append(i)
        if len(frame) == n:
            break
    if len(frame) < n:
        raise ValueError("configuration does not span the lattice")
    fmat = linalg.frac_matrix([vecs[i] for i in frame], n)
    finv = linalg.inverse(fmat)
    search = _BasisImageSearch(fmat.dot(lattice.gram).dot(fmat.T), lattice.gram, vecs)
    keys = {linalg.key(v) for v in vecs}
    out = []
    for images in search.extensions([]):
        g = finv.dot(linalg.frac_matrix([vecs[i] for i in images], n))
        if not linalg.is_integral(g):
            continue
        g = linalg.to_int(g)
        if all(linalg.key(v.dot(g)) in keys for v in vecs):
            out.append(g)
    return sorted(out, key=linalg.key)


# ---------------------------------------------------------------------------
# Discriminant actions and glue
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DiscriminantAction:
    """Automorphism of L^/L induced by an isometry, on SNF generators."""

    form: TorsionQuadraticForm = field(repr=False)
    images: Tuple[Tuple[int, ...], ...]

    def apply(self, element: Sequence[int]) -> Tuple[int, ...]:
        out = [0] * self.form.length
        for c, img in zip(element, self.images):
            out = [x + int(c) * y for x, y in zip(out, img)]
        return tuple(x % d for x, d in zip(out, self.form.orders))

    def _scaled_identity(self, s: int) -> Tuple[Tuple[int, ...], ...]:
        n = self.form.length
        return tuple(tuple((s * int(i == j)) % self.form.orders[j] for j in range(n)) for i in range(n))

    @property
    def is_identity(self) -> bool:
        return self.images == self._scaled_identity(1)

    @property
    def acts_as_pm1(self) -> bool:
        return self.images in (self._scaled_identity(1), self._scaled_identity(-1))


def discriminant_action(g: Isometry) -> DiscriminantAction:
    """Induced action of an isometry on the discriminant form."""
    form = g.lattice.discriminant_form()
    images = tuple(form.coordinates(v.dot(g.matrix)) for v in form.generators)
    return DiscriminantAction(form, images)


def _transport(group: comb.PermutationGroup, pairs: Sequence[Tuple[int, int]]
               ) -> Optional[Tuple[comb.Permutation, comb.PermutationGroup]]:
    """Some x with src^x = dst for all pairs, and the pointwise stabilizer of the sources."""
    acc = group.identity
    current = group
    for k, (src, _) in enumerate(pairs):
        dst = pairs[k][1] ^ (~acc)
        reps = dict(current.orbit_transversal(src, pairs=True))
        if dst not in reps:
            return None
        acc = reps[dst] * acc
        current = current.stabilizer(src)
    return acc, current


class GlueContext:
    """Extends isometries of A to the overlattice C of A + B.

    The group ``group_b`` of B must carry a faithful permutation domain
    (as returned by :func:`definite_orthogonal_group`).
    """

    def __init__(self, over: Overlattice, group_b: FiniteMatrixGroup):
        self.over = over
        self.group_b = group_b
        self.na = over.left.rank
        self.nb = over.right.rank
        self.form_b = over.right.discriminant_form()
        self.form_c = over.lattice.discriminant_form() if over.lattice.is_even() else None
        basis = over.basis
        self.proj_a = basis[:, : self.na]
        self.proj_b = basis[:, self.na:]
        self._elements = self.form_b.elements()
        self._element_index = {e: i for i, e in enumerate(self._elements)}
        self._group = self._permutation_group()

    def _permutation_group(self) -> comb.PermutationGroup:
        offset = len(self.group_b.domain)
        degree = offset + len(self._elements)
        perms = []
        for g in self.group_b.generators:
            dom = self.group_b.permutation(g)
            disc = [offset + self._element_index[self.form_b.coordinates(self.form_b.vector_of(e).dot(g))]
                    for e in self._elements]
            perms.append(comb.Permutation(dom + disc))
        if not perms:
            perms = [comb.Permutation(list(range(degree)))]
        return comb.PermutationGroup(perms)

    def _partner(self, u: np.ndarray) -> Optional[np.ndarray]:
        """B-part of a vector of C whose A-part is u (defined modulo B)."""
        den = linalg.denominator(self.proj_a)
        target = u * den
        if not linalg.is_integral(target):
            den *= linalg.denominator(target)
            target = u * den
        z = linalg.solve_integer(linalg.to_int(self.proj_a * den), linalg.to_int(target))
        if z is None:
            return None
        return z.dot(self.proj_b)

    def required_action(self, g: np.ndarray, sign: Optional[int] = None
                        ) -> Optional[List[Tuple[Tuple[int, ...], Tuple[int, ...]]]]:
        """Pairs (x, y) of discriminant classes of B with x h = y forced on h.

        Args:
            g: Isometry matrix of A
            sign: If given, also require g + h to act as sign on C^/C

        Returns:
            The constraints, or None if g admits no extension at all
        """
        rows = list(self.over.basis)
        signs = [0] * len(rows)
        if sign is not None:
            if self.form_c is None:
                raise UnsupportedError("discriminant action needs an even overlattice")
            for y in self.form_c.generators:
                rows.append(y.dot(self.over.basis))
                signs.append(sign)
        pairs = {}
        for x, s in zip(rows, signs):
            xa, xb = x[: self.na], x[self.na:]
            u = xa.dot(g) - s * xa
            partner = self._partner(u)
            if partner is None:
                return None
            src = self.form_b.coordinates(xb)
            dst = self.form_b.coordinates(partner + s * xb)
            if pairs.setdefault(src, dst) != dst:
                return None
        return sorted(pairs.items())

    def _points(self, constraints) -> List[Tuple[int, int]]:
        offset = len(self.group_b.domain)
        return [(offset + self._element_index[s], offset + self._element_index[t]) for s, t in constraints]

    def extension(self, g: np.ndarray, sign: Optional[int] = None) -> Optional[np.ndarray]:
        """One h in the group with g + h preserving C, or None."""
        constraints = self.required_action(g, sign)
        if constraints is None:
            return None
        found = _transport(self._group, self._points(constraints))
        if found is None:
            return None
        return self.group_b.matrix_of(found[0].array_form)

    def extensions(self, g: np.ndarray, sign: Optional[int] = None) -> List[np.ndarray]:
        """All h in the group with g + h preserving C."""
        constraints = self.required_action(g, sign)
        if constraints is None:
            return []
        found = _transport(self._group, self._points(constraints))
        if found is None:
            return []
        x, stab = found
        out = [self.group_b.matrix_of((s * x).array_form) for s in stab.generate()]
        return sorted(out, key=linalg.key)

    def extend(self, g: np.ndarray, h: np.ndarray) -> np.ndarray:
        """Matrix of g + h on C in the basis of C."""
        block = linalg.zeros(self.na + self.nb, self.na + self.nb)
        block[: self.na, : self.na] = g
        block[self.na:, self.na:] = h
        basis = self.over.basis
        return linalg.to_int(basis.dot(block).dot(linalg.inverse(basis)))


def glue_compatible_extensions(
    g: np.ndarray, group_b: FiniteMatrixGroup, over: Overlattice
) -> List[Tuple[np.ndarray, np.ndarray]]:
    """All (h, g + h on C) with h in ``group_b`` and g + h preserving C."""
    ctx = GlueContext(over, group_b)
    return [(h, ctx.extend(g, h)) for h in ctx.extensions(g)]


# ---------------------------------------------------------------------------
# Mod-2 images
# ---------------------------------------------------------------------------


def mod2(g: np.ndarray) -> np.ndarray:
    return linalg.int_matrix([[int(x) % 2 for x in row] for row in g], g.shape[1])


def _f2_permutation(g: np.ndarray) -> List[int]:
    """Permutation of the non-zero vectors of F_2^n (bitmask v at index v - 1)."""
    n = g.shape[0]
    rows = [sum((int(g[i, j]) & 1) << j for j in range(n)) for i in range(n)]
    out = []
    for v in range(1, 1 << n):
        w = 0
        for i in range(n):
            if v >> i & 1:
                w ^= rows[i]
        out.append(w - 1)
    return out


def mod2_permutation_group(generators: Sequence[np.ndarray]) -> comb.PermutationGroup:
    """Image of integer matrices in GL_n(F_2) acting on non-zero vectors."""
    if not generators:
        raise ValueError("need at least one generator")
    return comb.PermutationGroup([comb.Permutation(_f2_permutation(g)) for g in generators])


def matrix_group_order(generators: Sequence[np.ndarray]) -> int:
    """Order of the group generated by the mod-2 reductions of the matrices.

    Uses the deterministic incremental Schreier-Sims algorithm, so the
    result is certified.
    """
    return int(mod2_permutation_group(generators).order())


@dataclass(frozen=True)
class SymmetricCertificate:
    """Evidence that a mod-2 image is a symmetric group S_n."""

    degree: int
    order: int
    natural_orbit: Optional[Tuple[int, ...]]

    @property
    def order_matches(self) -> bool:
        return self.order == factorial(self.degree)

    @property
    def certified(self) -> bool:
        return self.order_matches and self.natural_orbit is not None


def certify_symmetric(generators: Sequence[np.ndarray], degree: int) -> SymmetricCertificate:
    """Check order n! and look for a faithful action on n points.

    The points are searched among the orbits of the image on non-zero
    F_2-vectors; an orbit of size n on which the action has order n! makes
    the image the full symmetric group of that orbit.
    """
    group = mod2_permutation_group(generators)
    order = int(group.order())
    natural = None
    if order == factorial(degree):
        for orbit in sorted(group.orbits(), key=min):
            if len(orbit) != degree:
                continue
            points = sorted(orbit)
            pos = {p: i for i, p in enumerate(points)}
            restricted = comb.PermutationGroup(
                [comb.Permutation([pos[p ^ g] for p in points]) for g in group.generators]
            )
            if restricted.order() == order:
                natural = tuple(p + 1 for p in points)
                break
    if natural is None:
        logger.warning(f"mod-2 image of order {order}: no natural action on {degree} points found")
    return SymmetricCertificate(degree, order, natural)
