"""Induced chambers on the positive cone of S_Y and their semi-symplectic symmetries.

S_Y(2) sits in S_X, which sits primitively in the even unimodular lattice
L26 of signature (1, 25). Conway chambers of L26 cut the positive cone of
S_Y into induced chambers; every chamber is written D = D0^tau for an
isometry tau of S_Y.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Eq, Rational, symbols
from sympy.solvers.simplex import lpmax

from ..config import settings
from ..exceptions import NotAWallError, SetupValidationError, UnsupportedError
from ..models.fixtures import BuiltFixture, FixtureExpected
from ..models.reports import WallOrbit
from ..utils.logger import logger
from . import linalg
from .enumeration import AffineSlice, constrained_vectors, fixed_pairing_vectors, root_type, separating_roots
from .isometries import FiniteMatrixGroup, GlueContext, definite_orthogonal_group, reflection, configuration_automorphisms
from .lattice import Lattice, Overlattice, Sublattice


# ---------------------------------------------------------------------------
# Geometry of S_Y inside L26
# ---------------------------------------------------------------------------


def restriction(l26: Lattice, sy_in_l26: np.ndarray, gram_y: np.ndarray, x: Sequence) -> np.ndarray:
    """The vector v of S_Y with <y, v>_Y = <y, x>_L26 for every y in S_Y."""
    pairing = linalg.vector(x).dot(l26.gram).dot(sy_in_l26.T)
    return pairing.dot(linalg.inverse(gram_y))


def leech_roots(l26: Lattice, weyl: Sequence, a: Sequence, value: int) -> List[np.ndarray]:
    """Roots r of L26 with <w, r> = 1 and <a, r> = value for a of positive norm."""
    funcs = np.stack([l26.pairings(weyl), l26.pairings(a)], axis=1)
    return AffineSlice(l26.gram, funcs).vectors([1, value], -2)


def walk_to_chamber(l26: Lattice, weyl: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Reflect the Conway chamber of ``weyl`` until it contains ``a``.

    Each step replaces w by s_r(w) = w + r for a Leech root r with <a, r> < 0,
    which lowers <w, a> by at least one.

    Raises:
        SetupValidationError: If w and a are not in the same positive cone
    """
    w = linalg.vector(weyl)
    aa = l26.norm(a)
    steps = 0
    while True:
        wa = l26.product(w, a)
        if wa <= 0:
            raise SetupValidationError("weyl", "Weyl vector is not on the side of alpha")
        lower = ceil(aa / (2 * wa) - wa)
        violated = None
        for c in range(-1, lower - 1, -1):
            found = leech_roots(l26, w, a, c)
            if found:
                violated = found[0]
                break
        if violated is None:
            logger.info(f"Conway chamber reached after {steps} reflections, <w, alpha> = {wa}")
            return w
        w = w + violated
        steps += 1
        logger.debug(f"walk step {steps}: <w, alpha> = {l26.product(w, a)}")


def wall_candidates(l26: Lattice, sy_in_l26: np.ndarray, gram_y: np.ndarray, weyl: np.ndarray) -> List[np.ndarray]:
    """S_Y vectors v = 2 r_S for Leech roots r whose hyperplane meets the cone of S_Y.

    With r = r_S + r_P split along S_Y(2) and its complement P, the norm of
    r_P lies in (-2, 0] and <w, r> = 1 fixes <v, u_w>.
    """
    s_y = Lattice(gram_y)
    p_sub = Sublattice(l26, sy_in_l26).orthogonal_complement()
    p = p_sub.lattice
    u_w = restriction(l26, sy_in_l26, gram_y, weyl)
    if s_y.norm(u_w) <= 0:
        raise SetupValidationError("weyl", "projection of the Weyl vector to S_Y has no positive norm")
    parts = [linalg.vector([Fraction(0)] * l26.rank)]
    for c in constrained_vectors(p, [], -1, dual=True):
        parts.append(linalg.vector(c).dot(p_sub.basis))
    out: Dict[Tuple, np.ndarray] = {}
    for r_p in parts:
        k = l26.product(weyl, r_p)
        v_norm = 2 * (-2 - l26.norm(r_p))
        for v in fixed_pairing_vectors(s_y, v_norm, u_w, 2 * (1 - k)):
            r = linalg.vector(v).dot(sy_in_l26) / 2 + r_p
            if linalg.is_integral(r):
                out.setdefault(linalg.key(v), linalg.to_int(linalg.vector(v)))
    logger.debug(f"{len(parts)} dual parts in P, {len(out)} candidate walls")
    return sorted(out.values(), key=linalg.key)


def _is_wall(gram_y: np.ndarray, vectors: Sequence[np.ndarray], i: int, alpha: np.ndarray) -> bool:
    """Exact LP: is some x with <x, alpha> = 1 strictly beyond only the i-th hyperplane?"""
    n = gram_y.shape[0]
    xs = symbols(f"x0:{n}")
    t = symbols("t")

    def pair(v) -> object:
        row = linalg.vector(v).dot(gram_y)
        return sum(Rational(Fraction(c).numerator, Fraction(c).denominator) * x for c, x in zip(row, xs))

    constraints = [pair(vectors[i]) + t <= 0, t <= 1, Eq(pair(alpha), 1)]
    constraints += [pair(v) - t >= 0 for j, v in enumerate(vectors) if j != i]
    value, _ = lpmax(t, constraints)
    return value > 0


def essential_walls(gram_y: np.ndarray, candidates: Sequence[np.ndarray], alpha: np.ndarray) -> List[np.ndarray]:
    """Drop candidate hyperplanes that do not bound the cone they cut out."""
    return [v for i, v in enumerate(candidates) if _is_wall(gram_y, candidates, i, alpha)]


def induced_walls(l26: Lattice, sy_in_l26: np.ndarray, weyl: np.ndarray, alpha: np.ndarray) -> List[np.ndarray]:
    """Walls of the induced chamber D0 containing alpha (S_Y coordinates).

    Raises:
        SetupValidationError: If alpha lies on a candidate hyperplane or a wall is not a (-2)-vector
    """
    gram_y = sy_in_l26.dot(l26.gram).dot(sy_in_l26.T) / 2
    s_y = Lattice(gram_y)
    candidates = wall_candidates(l26, sy_in_l26, gram_y, weyl)
    if any(s_y.product(alpha, v) <= 0 for v in candidates):
        raise SetupValidationError("alpha", "alpha is not in the interior of the induced chamber")
    walls = essential_walls(gram_y, candidates, alpha)
    bad = [v for v in walls if s_y.norm(v) != -2]
    if bad:
        raise SetupValidationError("walls", f"{len(bad)} walls of D0 are not (-2)-vectors")
    logger.info(f"D0 has {len(walls)} walls among {len(candidates)} candidates")
    return walls


# ---------------------------------------------------------------------------
# Setup
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EnriquesSetup:
    """Validated embeddings S_Y(2) -> S_X -> L26 with the initial chamber D0."""

    name: str
    s_y: Lattice
    s_x: Lattice
    q: Lattice
    l26: Lattice
    sx_in_l26: np.ndarray = field(repr=False)
    sy2_in_sx: np.ndarray = field(repr=False)
    q_in_sx: np.ndarray = field(repr=False)
    p: Sublattice = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    weyl: np.ndarray = field(repr=False)
    walls: Tuple[np.ndarray, ...] = field(repr=False)
    o_q: FiniteMatrixGroup = field(repr=False)
    o_sy_d0: FiniteMatrixGroup = field(repr=False)
    glue: GlueContext = field(repr=False)
    expected: FixtureExpected = field(repr=False)

    @property
    def sy_in_l26(self) -> np.ndarray:
        return self.sy2_in_sx.dot(self.sx_in_l26)

    def pullback(self, y: Sequence) -> np.ndarray:
        """pi^* of a class of S_Y, in S_X coordinates."""
        return linalg.vector(y).dot(self.sy2_in_sx)


def _check(condition: bool, clause: str, detail: str = "") -> None:
    if not condition:
        raise SetupValidationError(clause, detail)


def _frame(vectors: Sequence[np.ndarray], n: int) -> Tuple[int, ...]:
    frame: List[int] = []
    for i, v in enumerate(vectors):
        if linalg.rank(linalg.frac_matrix([vectors[j] for j in frame] + [v], n)) == len(frame) + 1:
            frame.append(i)
        if len(frame) == n:
            break
    return tuple(frame)


def assemble_setup(
    name: str,
    l26: Lattice,
    sx_in_l26: np.ndarray,
    sy2_in_sx: np.ndarray,
    alpha: Sequence[int],
    weyl: Sequence[int],
    expected: FixtureExpected,
    walls: Optional[Sequence[Sequence[int]]] = None,
) -> EnriquesSetup:
    """Check every setup invariant and derive Q, P, O(Q), the walls of D0 and O(S_Y, D0).

    Raises:
        SetupValidationError: Naming the first violated invariant
    """
    _check(l26.is_even() and l26.is_unimodular() and l26.signature() == (1, 25),
           "L26", "L26 must be even unimodular of signature (1,25)")
    sx_sub = Sublattice(l26, sx_in_l26)
    _check(sx_sub.is_primitive(), "SX_in_L26", "S_X is not primitive in L26")
    s_x = sx_sub.lattice
    sy2_sub = Sublattice(s_x, sy2_in_sx)
    _check(sy2_sub.is_primitive(), "SY2_in_SX", "S_Y(2) is not primitive in S_X")
    gram_y = sy2_sub.lattice.gram / 2
    s_y = Lattice(gram_y, "S_Y")
    _check(s_y.is_even() and s_y.is_unimodular() and s_y.signature() == (1, 9),
           "S_Y", "S_Y must be even unimodular of signature (1,9)")
    q_sub = sy2_sub.orthogonal_complement()
    q = Lattice(q_sub.lattice.gram, "Q")
    _check(q.is_negative_definite(), "Q", "Q is not negative definite")
    sy_in_l26 = linalg.to_int(sy2_in_sx.dot(sx_in_l26))
    p = Sublattice(l26, sy_in_l26).orthogonal_complement()
    _check(p.rank == 16 and p.lattice.is_negative_definite(), "P", "P must be negative definite of rank 16")
    found_type = root_type(p.lattice)
    _check(found_type == expected.root_type, "root_type", f"root type of P is {found_type}, expected {expected.root_type}")

    alpha = linalg.vector(alpha)
    weyl = linalg.vector(weyl)
    _check(s_y.norm(alpha) > 0, "alpha", "alpha must have positive norm")
    _check(l26.norm(weyl) == 0, "weyl", "Weyl vector must be isotropic")
    if walls is None:
        wall_list = induced_walls(l26, sy_in_l26, weyl, alpha)
    else:
        wall_list = [linalg.vector(v) for v in walls]
        _check(all(s_y.norm(v) == -2 for v in wall_list), "walls", "walls must be (-2)-vectors")
        _check(all(s_y.product(alpha, v) > 0 for v in wall_list), "alpha", "alpha must pair positively with every wall")
    wall_list = sorted(wall_list, key=linalg.key)

    o_q = definite_orthogonal_group(q)
    _check(o_q.order == expected.oq_order, "OQ_order", f"|O(Q)| = {o_q.order}, expected {expected.oq_order}")
    elements = configuration_automorphisms(s_y, wall_list)
    o_sy_d0 = FiniteMatrixGroup(s_y, tuple(elements), len(elements), tuple(wall_list), _frame(wall_list, s_y.rank))

    m = linalg.frac_matrix(list(sy2_in_sx) + list(q_sub.basis), s_x.rank)
    over = Overlattice(s_x, linalg.inverse(m), abs(int(linalg.determinant(m))), s_y.rescale(2), q)
    logger.info(
        f"setup {name}: {len(wall_list)} walls, |O(Q)| = {o_q.order}, |O(S_Y, D0)| = {len(elements)}, "
        f"root type of P {found_type}"
    )
    return EnriquesSetup(
        name, s_y, s_x, q, l26, sx_in_l26, sy2_in_sx, q_sub.basis, p, alpha, weyl,
        tuple(wall_list), o_q, o_sy_d0, GlueContext(over, o_q), expected,
    )


def load_setup(fixture: BuiltFixture) -> EnriquesSetup:
    """Validate a built fixture and turn it into an :class:`EnriquesSetup`."""
    l26 = Lattice(linalg.int_matrix(fixture.l26), "L26")
    return assemble_setup(
        fixture.name,
        l26,
        linalg.int_matrix(fixture.sx_in_l26, l26.rank),
        linalg.int_matrix(fixture.sy2_in_sx, len(fixture.sx_in_l26)),
        fixture.alpha,
        fixture.weyl,
        fixture.expected,
        fixture.walls,
    )


# ---------------------------------------------------------------------------
# Chambers
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Chamber:
    """The induced chamber D0^tau."""

    tau: np.ndarray
    walls: Tuple[np.ndarray, ...] = field(repr=False)
    interior_point: np.ndarray = field(repr=False)

    @property
    def key(self) -> Tuple:
        return linalg.key(self.tau)

    def has_wall(self, r: Sequence) -> bool:
        k = linalg.key(linalg.vector(r))
        return any(linalg.key(v) == k for v in self.walls)


def chamber_of(setup: EnriquesSetup, tau: np.ndarray) -> Chamber:
    walls = tuple(sorted((v.dot(tau) for v in setup.walls), key=linalg.key))
    return Chamber(tau, walls, setup.alpha.dot(tau))


def initial_chamber(setup: EnriquesSetup) -> Chamber:
    return chamber_of(setup, linalg.identity(setup.s_y.rank))


def adjacent_chamber(setup: EnriquesSetup, chamber: Chamber, r: Sequence) -> Chamber:
    """The chamber across the wall r: tau' = tau s_r.

    Raises:
        NotAWallError: If r is not a wall of the chamber
    """
    if not chamber.has_wall(r):
        raise NotAWallError(f"{list(r)} is not a wall of the chamber")
    return chamber_of(setup, chamber.tau.dot(reflection(setup.s_y, r).matrix))


def pairing_key(setup: EnriquesSetup, chamber: Chamber) -> Tuple:
    """Sorted pairings of the interior point with the walls.

    Chambers with different keys are never matched by aut_s(Y).
    """
    return tuple(sorted(setup.s_y.product(chamber.interior_point, r) for r in chamber.walls))


def is_in_nef_cone(setup: EnriquesSetup, chamber: Chamber) -> bool:
    """True if no root of S_X separates pi^* alpha from pi^* alpha^tau."""
    a = setup.pullback(setup.alpha)
    b = setup.pullback(chamber.interior_point)
    return not separating_roots(setup.s_x, a, b)


def lifts_semisymplectically(setup: EnriquesSetup, g: np.ndarray) -> bool:
    """g extends to S_X with an isometry of Q, acting as +-1 on the discriminant of S_X."""
    return any(setup.glue.extension(g, sign) is not None for sign in (1, -1))


def semisymplectic_lifts(setup: EnriquesSetup, source: Chamber, target: Chamber) -> List[np.ndarray]:
    """Elements of aut_s(Y) mapping ``source`` onto ``target``, sorted.

    Raises:
        UnsupportedError: If either chamber is outside the nef cone
    """
    for c in (source, target):
        if not is_in_nef_cone(setup, c):
            raise UnsupportedError("semi-symplectic lifts are only computed for chambers in the nef cone")
    tau_inv = linalg.unimodular_inverse(source.tau)
    out = []
    for h in setup.o_sy_d0.generators:
        g = tau_inv.dot(h).dot(target.tau)
        if lifts_semisymplectically(setup, g):
            out.append(linalg.to_int(g))
    return sorted(out, key=linalg.key)


def wall_orbits(walls: Sequence[np.ndarray], group: Sequence[np.ndarray]) -> List[List[int]]:
    """Orbits of wall indices under a finite group of matrices."""
    index = {linalg.key(v): i for i, v in enumerate(walls)}
    parent = list(range(len(walls)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for g in group:
        for i, v in enumerate(walls):
            j = index[linalg.key(v.dot(g))]
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    orbits: Dict[int, List[int]] = {}
    for i in range(len(walls)):
        orbits.setdefault(find(i), []).append(i)
    return sorted(orbits.values())


def wall_orbit_report(
    setup: EnriquesSetup, chamber: Chamber, stabilizer: Optional[Sequence[np.ndarray]] = None
) -> List[WallOrbit]:
    """Orbits of the walls of a chamber under aut_s(Y, D), tagged inner or outer."""
    if stabilizer is None:
        stabilizer = semisymplectic_lifts(setup, chamber, chamber)
    orbits = wall_orbits(chamber.walls, stabilizer)
    reps = [chamber.walls[o[0]] for o in orbits]

    def outer(r: np.ndarray) -> bool:
        return not is_in_nef_cone(setup, adjacent_chamber(setup, chamber, r))

    if settings.thread_count > 1:
        with ThreadPoolExecutor(max_workers=settings.thread_count) as pool:
            flags = list(pool.map(outer, reps))
    else:
        flags = [outer(r) for r in reps]
    report = [
        WallOrbit(size=len(o), outer=f, representative=[int(x) for x in r])
        for o, r, f in zip(orbits, reps, flags)
    ]
    return sorted(report, key=lambda o: (not o.outer, -o.size, o.representative))
