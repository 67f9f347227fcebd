"""Construction of the Enriques fixtures S_Y(2) -> S_X -> L26.

The builder glues S_Y(2) to a negative definite lattice P of the right
genus and root type, finds a Weyl vector of the resulting L26, embeds Q
into P so that S_X lands in the requested genus, and computes the walls
of the induced chamber around a generic ample class.
"""
import random
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from ..config import settings
from ..exceptions import FixtureError, GlueError, SetupValidationError
from ..models.fixtures import BuiltFixture, FixtureSpec, QType, load_built_fixture
from ..utils.logger import logger
from . import linalg
from .chambers import induced_walls, walk_to_chamber
from .enumeration import constrained_vectors, lll_reduce_lattice, root_type, short_vectors
from .genus import GenusSymbol, genus_symbol, has_roots, neighbor, orthogonal_genus
from .lattice import Lattice, Sublattice, anti_isometry, overlattice_from_glue
from .root_lattices import cartan_a, cartan_d, cartan_e, l10

Q_LATTICES = {
    QType.A6: lambda: cartan_a(6).rescale(-2),
    QType.E6: lambda: cartan_e(6).rescale(-2),
    QType.A8: lambda: cartan_a(8).rescale(-2),
}


def seed_complement() -> Lattice:
    """E8(-2) + D8(-1), a lattice in the genus of the complement of S_Y(2) in L26."""
    return Lattice(cartan_e(8).rescale(-2).direct_sum(cartan_d(8).rescale(-1)).gram, "P0")


def q_lattice(q_type: QType) -> Lattice:
    return Q_LATTICES[q_type]()


def _random_isotropic(lattice: Lattice, p: int, rng: random.Random) -> np.ndarray:
    g = lattice.int_gram
    while True:
        v = linalg.vector([rng.randrange(p) for _ in range(lattice.rank)])
        if any(x % p for x in v) and v.dot(g).dot(v) % p == 0:
            return v


def neighbor_walk(start: Lattice, target_type: str, rng: random.Random, max_steps: Optional[int] = None) -> Lattice:
    """Random p-neighbor steps from ``start`` until the root type matches.

    Neighbors at a prime not dividing det stay in the genus.

    Raises:
        SetupValidationError: If the step cap is reached first
    """
    max_steps = max_steps if max_steps is not None else settings.fixture_max_neighbor_steps
    p = settings.neighbor_prime or 3
    lattice = lll_reduce_lattice(start)
    for step in range(max_steps + 1):
        found = root_type(lattice)
        if found == target_type:
            logger.info(f"root type {target_type} reached after {step} neighbor steps")
            return Lattice(lattice.gram, "P")
        logger.debug(f"neighbor step {step}: root type {found}")
        lattice = lll_reduce_lattice(neighbor(lattice, _random_isotropic(lattice, p, rng), p))
    raise SetupValidationError("root_type", f"no lattice of root type {target_type} within {max_steps} steps")


def glue_to_l26(s_y2: Lattice, p: Lattice) -> Tuple[Lattice, np.ndarray, np.ndarray]:
    """Glue S_Y(2) + P along an anti-isometry of their discriminant forms.

    Returns:
        (L26, S_Y(2) basis in L26 coordinates, P basis in L26 coordinates)

    Raises:
        GlueError: If the discriminant forms are not anti-isometric
    """
    qa, qb = s_y2.discriminant_form(), p.discriminant_form()
    images = anti_isometry(qa, qb)
    if images is None:
        raise GlueError("discriminant forms of S_Y(2) and P are not anti-isometric")
    units = [tuple(int(i == j) for j in range(qa.length)) for i in range(qa.length)]
    over = overlattice_from_glue(s_y2, p, list(zip(units, images)))
    if not (over.lattice.is_unimodular() and over.lattice.is_even()):
        raise GlueError("glued lattice is not even unimodular")
    to_l26 = linalg.inverse(over.basis)
    n, m = s_y2.rank, p.rank
    sy = linalg.to_int(linalg.identity(n + m)[:n].dot(to_l26))
    pp = linalg.to_int(linalg.identity(n + m)[n:].dot(to_l26))
    l26 = Lattice(linalg.to_int(over.lattice.gram), "L26")
    logger.info(f"glued L26 of signature {l26.signature()} over an index {over.index} extension")
    return l26, sy, pp


# ---------------------------------------------------------------------------
# Weyl vector
# ---------------------------------------------------------------------------


def hyperbolic_partner(l26: Lattice, e: np.ndarray) -> np.ndarray:
    """An isotropic f with <e, f> = 1 for a primitive isotropic e of a unimodular lattice."""
    column = l26.int_gram.dot(e).reshape(l26.rank, 1)
    y = linalg.solve_integer(column, [1])
    if y is None:
        raise SetupValidationError("weyl", "isotropic vector is not primitive")
    return linalg.to_int(y - (l26.norm(y) / 2) * e)


def quotient_by_isotropic(l26: Lattice, w: np.ndarray) -> Lattice:
    """The definite lattice w^perp / w."""
    perp = Sublattice(l26, linalg.int_matrix([w], l26.rank)).orthogonal_complement().basis
    coords = linalg.solve_rational(perp, w)
    column = linalg.to_int(coords).reshape(perp.shape[0], 1)
    _, s, _ = linalg.smith_normal_form(column)
    completion = linalg.unimodular_inverse(s).T
    rest = completion[1:].dot(perp)
    return Lattice(rest.dot(l26.gram).dot(rest.T))


def is_weyl_vector(l26: Lattice, w: np.ndarray) -> bool:
    """Primitive isotropic with w^perp / w free of roots."""
    if l26.norm(w) != 0 or not linalg.is_primitive_vector(w):
        return False
    return not has_roots(quotient_by_isotropic(l26, w))


def weyl_vector(l26: Lattice, e: np.ndarray, rng: random.Random) -> np.ndarray:
    """A Weyl vector from the splitting L26 = U + K(-1) at an isotropic e.

    Candidates h e + (h+1) f + rho (and the variants with e, f or the sign
    of rho swapped) are tested with :func:`is_weyl_vector`.

    Raises:
        SetupValidationError: If no candidate is a Weyl vector
    """
    f = hyperbolic_partner(l26, e)
    k_sub = Sublattice(l26, linalg.int_matrix([e, f], l26.rank)).orthogonal_complement()
    k = k_sub.lattice
    roots = short_vectors(k, -2)
    h = 2 * len(roots) // k.rank
    logger.info(f"Niemeier component found: {2 * len(roots)} roots, Coxeter number {h}")
    rho = linalg.vector([0] * k.rank)
    if roots:
        while True:
            z = linalg.vector([rng.randint(-10 ** 6, 10 ** 6) for _ in range(k.rank)])
            values = [k.product(z, r) for r in roots]
            if all(v != 0 for v in values):
                break
        for r, v in zip(roots, values):
            rho = rho + (r if v > 0 else -r)
    rho_l = rho.dot(k_sub.basis) / 2
    for a, b in ((h, h + 1), (h + 1, h)):
        for sign in (1, -1):
            w = a * e + b * f + sign * rho_l
            if linalg.is_integral(w) and is_weyl_vector(l26, linalg.to_int(w)):
                return linalg.to_int(w)
    raise SetupValidationError("weyl", "no Weyl vector among the Niemeier candidates")


# ---------------------------------------------------------------------------
# Q inside P
# ---------------------------------------------------------------------------


def _random_embedding(q: Lattice, p: Lattice, pool: List[np.ndarray], rng: random.Random) -> Optional[np.ndarray]:
    """Randomized depth-first image search for a basis of Q among ``pool``.

    Each level tries a few shuffled candidates, so repeated calls sample
    different embeddings.
    """
    arr = np.array([[int(x) for x in v] for v in pool], dtype=np.int64)
    paired = arr.dot(np.array(p.int_gram, dtype=np.int64))
    target = q.int_gram
    chosen: List[int] = []
    columns: List[np.ndarray] = []

    def extend(i: int) -> bool:
        if i == q.rank:
            return True
        mask = np.ones(len(pool), dtype=bool)
        for j, col in enumerate(columns):
            mask &= col == int(target[i][j])
        candidates = [int(c) for c in np.flatnonzero(mask)]
        rng.shuffle(candidates)
        for c in candidates[:8]:
            chosen.append(c)
            columns.append(paired.dot(arr[c]))
            if extend(i + 1):
                return True
            chosen.pop()
            columns.pop()
        return False

    if not extend(0):
        return None
    return linalg.int_matrix([pool[c] for c in chosen], p.rank)


def embed_q(
    l26: Lattice,
    sy_in_l26: np.ndarray,
    p: Lattice,
    p_in_l26: np.ndarray,
    q: Lattice,
    target: GenusSymbol,
    rng: random.Random,
    attempts: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Embed Q primitively into P so that the saturation of S_Y(2) + Q lies in ``target``.

    Returns:
        (S_X basis in L26 coordinates, S_Y(2) basis in S_X coordinates)

    Raises:
        SetupValidationError: If no attempt reaches the target genus
    """
    attempts = attempts if attempts is not None else settings.embedding_attempts
    half = short_vectors(p, q.gram[0][0])
    pool = half + [-v for v in half]
    logger.info(f"{len(pool)} vectors of norm {q.gram[0][0]} in P")
    for attempt in range(attempts):
        q_in_p = _random_embedding(q, p, pool, rng)
        if q_in_p is None:
            continue
        if not Sublattice(p, q_in_p).is_primitive():
            logger.debug(f"embedding attempt {attempt}: Q not primitive in P")
            continue
        q_in_l26 = linalg.to_int(q_in_p.dot(p_in_l26))
        rows = linalg.int_matrix(list(sy_in_l26) + list(q_in_l26), l26.rank)
        sx = Sublattice(l26, rows).primitive_closure()
        found = genus_symbol(sx.lattice)
        if found.render() != target.render():
            logger.debug(f"embedding attempt {attempt}: S_X in {found.render()}")
            continue
        sy2_in_sx = linalg.to_int(Sublattice(l26, sy_in_l26).coordinates_in(sx))
        logger.info(f"Q embedded after {attempt + 1} attempts, S_X in {found.render()}")
        return sx.basis, sy2_in_sx
    raise SetupValidationError("Q", f"no embedding of Q giving S_X in {target.render()}")


# ---------------------------------------------------------------------------
# Ample class and walls
# ---------------------------------------------------------------------------


def _random_alpha(s_y: Lattice, rng: random.Random) -> np.ndarray:
    while True:
        k = rng.randint(4, 9)
        v = [k + rng.randint(0, 3), k + rng.randint(0, 3)] + [rng.randint(-1, 1) for _ in range(s_y.rank - 2)]
        alpha = linalg.vector(v)
        if s_y.norm(alpha) > 0 and linalg.is_primitive_vector(alpha):
            return alpha


def choose_chamber(
    l26: Lattice,
    s_x: Lattice,
    sy_in_l26: np.ndarray,
    sy2_in_sx: np.ndarray,
    weyl: np.ndarray,
    rng: random.Random,
    tries: int = 50,
) -> Tuple[np.ndarray, np.ndarray, List[np.ndarray]]:
    """Pick a generic ample alpha, walk w to its Conway chamber and compute the walls of D0.

    Returns:
        (alpha, weyl, walls)
    """
    s_y = l10()
    last: Optional[SetupValidationError] = None
    for _ in range(tries):
        alpha = _random_alpha(s_y, rng)
        pulled = alpha.dot(sy2_in_sx)
        if constrained_vectors(s_x, [(pulled, 0)], -2):
            continue
        a = alpha.dot(sy_in_l26)
        w = weyl if l26.product(weyl, a) > 0 else -weyl
        try:
            w = walk_to_chamber(l26, w, a)
            walls = induced_walls(l26, sy_in_l26, w, alpha)
        except SetupValidationError as exc:
            if exc.clause != "alpha":
                raise
            last = exc
            continue
        return alpha, linalg.to_int(w), walls
    raise last or SetupValidationError("alpha", "no generic ample class found")


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------


SETUP_NAMES = ("f7", "rho16", "rho18")


def spec_path(name: str) -> Path:
    return settings.fixture_path / "specs" / f"{name}.json"


def built_path(name: str) -> Path:
    return settings.fixture_path / "built" / f"{name}.json"


def build_fixture(spec: FixtureSpec, seed: Optional[int] = None) -> BuiltFixture:
    """Run the whole construction for one fixture spec."""
    rng = random.Random(settings.seed if seed is None else seed)
    target = orthogonal_genus(GenusSymbol.parse(spec.transcendental_genus))
    logger.info(f"building fixture {spec.name}: S_X in {target.render()}, P of root type {spec.expected.root_type}")

    s_y2 = l10().rescale(2)
    p = neighbor_walk(seed_complement(), spec.expected.root_type, rng)
    l26, sy_in_l26, p_in_l26 = glue_to_l26(s_y2, p)
    e = linalg.primitive_vector(sy_in_l26[0])
    weyl = weyl_vector(l26, e, rng)
    sx_in_l26, sy2_in_sx = embed_q(l26, sy_in_l26, p, p_in_l26, q_lattice(spec.q_type), target, rng)
    s_x = Sublattice(l26, sx_in_l26).lattice
    alpha, weyl, walls = choose_chamber(l26, s_x, sy_in_l26, sy2_in_sx, weyl, rng)

    def rows(m) -> List[List[int]]:
        return [[int(x) for x in row] for row in m]

    return BuiltFixture(
        name=spec.name,
        L26=rows(l26.int_gram),
        SX_in_L26=rows(sx_in_l26),
        SY2_in_SX=rows(sy2_in_sx),
        alpha=[int(x) for x in alpha],
        weyl=[int(x) for x in weyl],
        walls=rows(walls),
        expected=spec.expected,
    )


def load_or_build(spec: FixtureSpec, rebuild: bool = False) -> BuiltFixture:
    """Cached built fixture, building and saving it when missing."""
    path = built_path(spec.name)
    if path.exists() and not rebuild:
        try:
            return load_built_fixture(path)
        except FixtureError as exc:
            logger.warning(f"ignoring unreadable cache {path}: {exc}")
    fixture = build_fixture(spec)
    fixture.save(path)
    logger.info(f"fixture {spec.name} written to {path}")
    return fixture
