"""Exact vector enumeration in definite lattices and compact affine slices.

All pruning bounds are exact rationals; LLL is only a preprocessing step
and its transform is replayed in exact integer arithmetic.
"""
from collections import Counter
from functools import lru_cache
from fractions import Fraction
from math import floor, ceil, isqrt
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from ..config import settings
from ..exceptions import UnsupportedError
from ..utils.logger import logger
from . import linalg
from .lattice import Lattice, _congruence_signs

try:
    from fpylll import GSO, LLL, IntegerMatrix

    HAS_FPYLLL = True
except ImportError:
    HAS_FPYLLL = False


@lru_cache(maxsize=None)
def _warn_exact_lll() -> None:
    logger.warning("fpylll not installed; falling back to exact rational LLL")


# ---------------------------------------------------------------------------
# LLL on Gram matrices
# ---------------------------------------------------------------------------


def _lll_fpylll(gram: np.ndarray, delta: float) -> np.ndarray:
    n = gram.shape[0]
    g = IntegerMatrix.from_matrix([[int(x) for x in row] for row in gram])
    u = IntegerMatrix.identity(n)
    m = GSO.Mat(g, U=u, flags=GSO.INT_GRAM)
    m.update_gso()
    LLL.Reduction(m, delta=delta)()
    return linalg.int_matrix([[u[i, j] for j in range(n)] for i in range(n)], n)


def _lll_exact(gram: np.ndarray, delta: Fraction) -> np.ndarray:
    """Rational LLL on a positive definite Gram matrix; returns the transform."""
    n = gram.shape[0]
    g = [[Fraction(x) for x in row] for row in gram]
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    mu = [[Fraction(0)] * n for _ in range(n)]
    b = [Fraction(0)] * n
    b[0] = g[0][0]
    kmax = 0
    k = 1

    def reduce(k: int, l: int) -> None:
        if abs(mu[k][l]) <= Fraction(1, 2):
            return
        q = round(mu[k][l])
        u[k] = [x - q * y for x, y in zip(u[k], u[l])]
        row = [x - q * y for x, y in zip(g[k], g[l])]
        row[k] -= q * row[l]
        g[k] = row
        for r in range(n):
            if r != k:
                g[r][k] = row[r]
        mu[k][l] -= q
        for i in range(l):
            mu[k][i] -= q * mu[l][i]

    def swap(k: int) -> None:
        u[k], u[k - 1] = u[k - 1], u[k]
        g[k], g[k - 1] = g[k - 1], g[k]
        for row in g:
            row[k], row[k - 1] = row[k - 1], row[k]
        for j in range(k - 1):
            mu[k][j], mu[k - 1][j] = mu[k - 1][j], mu[k][j]
        m = mu[k][k - 1]
        bn = b[k] + m * m * b[k - 1]
        mu[k][k - 1] = m * b[k - 1] / bn
        b[k] = b[k - 1] * b[k] / bn
        b[k - 1] = bn
        for i in range(k + 1, kmax + 1):
            t = mu[i][k]
            mu[i][k] = mu[i][k - 1] - m * t
            mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]

    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k):
                mu[k][j] = (g[k][j] - sum(mu[j][i] * mu[k][i] * b[i] for i in range(j))) / b[j]
            b[k] = g[k][k] - sum(mu[k][j] ** 2 * b[j] for j in range(k))
        reduce(k, k - 1)
        if b[k] < (delta - mu[k][k - 1] ** 2) * b[k - 1]:
            swap(k)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                reduce(k, l)
            k += 1
    return linalg.int_matrix(u, n)


def lll_reduce(gram: np.ndarray, delta: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """LLL-reduce a positive definite Gram matrix.

    Args:
        gram: Positive definite rational Gram matrix
        delta: Lovasz parameter (defaults to settings.lll_delta)

    Returns:
        (U, U G U^T) with U unimodular
    """
    n = gram.shape[0]
    if n <= 1:
        return linalg.identity(n), linalg.frac_matrix(gram, n)
    delta = delta if delta is not None else settings.lll_delta
    g = linalg.frac_matrix(gram, n)
    if HAS_FPYLLL and linalg.is_integral(g):
        u = _lll_fpylll(linalg.to_int(g), delta)
    else:
        if not HAS_FPYLLL:
            _warn_exact_lll()
        u = _lll_exact(g, Fraction(delta).limit_denominator(1000))
    return u, u.dot(g).dot(u.T)


def lll_reduce_lattice(lattice: Lattice) -> Lattice:
    """Same lattice in an LLL-reduced basis (definite input, sign kept)."""
    s_plus, s_minus = lattice.signature()
    if s_plus and s_minus:
        raise UnsupportedError("LLL needs a definite lattice")
    sign = -1 if s_plus == 0 else 1
    _, reduced = lll_reduce(lattice.gram * sign)
    return Lattice(reduced * sign, lattice.name)


# ---------------------------------------------------------------------------
# Fincke-Pohst
# ---------------------------------------------------------------------------


def _quadratic_decomposition(gram: np.ndarray) -> Tuple[List[Fraction], List[List[Fraction]]]:
    """Write Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2."""
    n = gram.shape[0]
    q = [[Fraction(x) for x in row] for row in gram]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    diag = [q[i][i] for i in range(n)]
    if any(d <= 0 for d in diag):
        raise UnsupportedError("Fincke-Pohst needs a positive definite form")
    return diag, q


def _interval(center: Fraction, radius_sq: Fraction) -> Tuple[int, int]:
    """Integers x with (x - center)^2 <= radius_sq, as a closed range."""
    if radius_sq < 0:
        return 1, 0
    r = isqrt(floor(radius_sq)) + 1
    lo = floor(center - r)
    hi = ceil(center + r)
    while lo <= hi and (lo - center) ** 2 > radius_sq:
        lo += 1
    while hi >= lo and (hi - center) ** 2 > radius_sq:
        hi -= 1
    return lo, hi


def fincke_pohst(
    gram: np.ndarray,
    bound: Fraction,
    center: Optional[Sequence[Fraction]] = None,
    exact: bool = False,
) -> Iterator[Tuple[np.ndarray, Fraction]]:
    """All integer x with (x - c) G (x - c)^T <= bound.

    Args:
        gram: Positive definite Gram matrix
        bound: Inclusive upper bound
        center: Rational center c (zero by default)
        exact: Only yield vectors attaining the bound exactly

    Yields:
        (x, value) pairs
    """
    n = gram.shape[0]
    bound = Fraction(bound)
    c = [Fraction(x) for x in center] if center is not None else [Fraction(0)] * n
    if n == 0:
        if bound >= 0 and (not exact or bound == 0):
            yield linalg.vector([]), Fraction(0)
        return
    diag, q = _quadratic_decomposition(gram)
    x = [0] * n
    rem = [Fraction(0)] * (n + 1)
    hi = [0] * n
    rem[n] = bound

    def open_level(i: int) -> None:
        shift = sum(q[i][j] * (x[j] - c[j]) for j in range(i + 1, n))
        lo, top = _interval(c[i] - shift, rem[i + 1] / diag[i])
        x[i] = lo
        hi[i] = top

    i = n - 1
    open_level(i)
    while True:
        if x[i] > hi[i]:
            i += 1
            if i == n:
                return
            x[i] += 1
            continue
        shift = sum(q[i][j] * (x[j] - c[j]) for j in range(i + 1, n))
        rem[i] = rem[i + 1] - diag[i] * (x[i] - c[i] + shift) ** 2
        if i == 0:
            if not exact or rem[0] == 0:
                yield linalg.vector(x), bound - rem[0]
            x[0] += 1
            continue
        i -= 1
        open_level(i)


def close_vectors(
    gram: np.ndarray,
    center: Sequence[Fraction],
    bound: Fraction,
    exact: bool = False,
) -> List[np.ndarray]:
    """Integer vectors within ``bound`` of ``center`` in a positive definite form.

    The form is LLL-reduced first; the transform is applied exactly.
    """
    n = gram.shape[0]
    if n == 0:
        return [z for z, _ in fincke_pohst(gram, bound, [], exact)]
    u, reduced = lll_reduce(gram)
    c = linalg.vector([Fraction(x) for x in center]).dot(linalg.unimodular_inverse(u))
    out = [z.dot(u) for z, _ in fincke_pohst(reduced, bound, c, exact)]
    return sorted(out, key=lambda v: tuple(v))


def _canonical_sign(v: np.ndarray) -> bool:
    lead = next((x for x in v if x != 0), 0)
    return lead > 0


def short_vectors(lattice: Lattice, norm) -> List[np.ndarray]:
    """Vectors of the given norm in a definite lattice, one of each +-v.

    Raises:
        UnsupportedError: If the lattice is indefinite
    """
    norm = Fraction(norm)
    s_plus, s_minus = lattice.signature()
    if s_plus and s_minus:
        raise UnsupportedError("short_vectors needs a definite lattice")
    sign = -1 if s_plus == 0 else 1
    if norm * sign <= 0:
        return []
    found = close_vectors(lattice.gram * sign, [0] * lattice.rank, norm * sign, exact=True)
    return [v for v in found if _canonical_sign(v)]


def vectors_by_norm(lattice: Lattice, max_norm) -> Dict[Fraction, List[np.ndarray]]:
    """All non-zero vectors with |norm| <= max_norm grouped by norm (both signs)."""
    s_plus, s_minus = lattice.signature()
    if s_plus and s_minus:
        raise UnsupportedError("vectors_by_norm needs a definite lattice")
    sign = -1 if s_plus == 0 else 1
    out: Dict[Fraction, List[np.ndarray]] = {}
    for v in close_vectors(lattice.gram * sign, [0] * lattice.rank, Fraction(max_norm)):
        if any(v):
            out.setdefault(lattice.norm(v), []).append(v)
    return out


def theta_prefix(lattice: Lattice, terms: int = 2) -> Tuple[int, ...]:
    """Numbers of vectors of norms 2, 4, ... (absolute values) up to +-."""
    sign = -1 if lattice.signature()[0] == 0 else 1
    by_norm = vectors_by_norm(lattice, 2 * terms)
    return tuple(len(by_norm.get(Fraction(2 * k * sign), [])) // 2 for k in range(1, terms + 1))


# ---------------------------------------------------------------------------
# Root systems
# ---------------------------------------------------------------------------


def _identify_component(rank: int, count: int) -> str:
    if count == rank * (rank + 1):
        return f"A{rank}"
    if rank >= 4 and count == 2 * rank * (rank - 1):
        return f"D{rank}"
    if (rank, count) in ((6, 72), (7, 126), (8, 240)):
        return f"E{rank}"
    raise ValueError(f"unrecognized root system of rank {rank} with {count} roots")


def format_root_type(components: Sequence[str]) -> str:
    """Canonical ADE string such as ``8A1+2D4``."""
    counts = Counter(components)
    order = sorted(counts, key=lambda s: (s[0], int(s[1:])))
    return "+".join(f"{counts[c] if counts[c] > 1 else ''}{c}" for c in order) or "0"


def root_type(lattice: Lattice) -> str:
    """ADE type of the root sublattice of a definite lattice."""
    sign = -1 if lattice.signature()[0] == 0 else 1
    roots = short_vectors(lattice, 2 * sign)
    if not roots:
        return "0"
    allroots = roots + [-v for v in roots]
    graph = nx.Graph()
    graph.add_nodes_from(range(len(allroots)))
    for i, v in enumerate(allroots):
        pv = lattice.pairings(v)
        for j in range(i + 1, len(allroots)):
            if pv.dot(allroots[j]) != 0:
                graph.add_edge(i, j)
    comps = []
    for comp in nx.connected_components(graph):
        vecs = linalg.int_matrix([allroots[i] for i in comp], lattice.rank)
        comps.append(_identify_component(linalg.rank(vecs), len(comp)))
    return format_root_type(comps)


# ---------------------------------------------------------------------------
# Compact affine slices
# ---------------------------------------------------------------------------


class AffineSlice:
    """Lattice points on {x : x . f_j = c_j} with prescribed norm.

    The form restricted to the kernel of the functionals must be definite;
    this is what makes every norm level a finite set.
    """

    def __init__(self, gram: np.ndarray, functionals: np.ndarray):
        """Prepare the slice.

        Args:
            gram: Gram matrix of the ambient lattice (rational)
            functionals: n x k matrix; column j is the functional f_j

        Raises:
            UnsupportedError: If the slice is not compact
        """
        self.gram = linalg.frac_matrix(gram, gram.shape[0])
        n, k = functionals.shape
        self.n = n
        self.scales = [linalg.denominator(functionals[:, j]) for j in range(k)]
        cols = [functionals[:, j] * self.scales[j] for j in range(k)]
        a = linalg.to_int(np.stack(cols, axis=1)) if k else linalg.zeros(n, 0)
        self.d, self.s, self.t = linalg.smith_normal_form(a) if k else ([], linalg.identity(n), linalg.identity(0))
        self.r = sum(1 for x in self.d if x != 0)
        kernel = self.s[self.r:].copy()
        m = kernel.dot(self.gram).dot(kernel.T)
        if kernel.shape[0] == 0:
            self.sign = 1
            self.kernel = kernel
            self.form = m
            self.form_inv = m
            return
        pos, neg, zero = _congruence_signs(m)
        if zero or (pos and neg):
            raise UnsupportedError("constraint region is not compact")
        self.sign = 1 if neg == 0 else -1
        u, reduced = lll_reduce(m * self.sign)
        self.kernel = u.dot(kernel)
        self.form = reduced
        self.form_inv = linalg.inverse(reduced)

    def particular(self, values: Sequence) -> Optional[np.ndarray]:
        """Some integer x with x . f_j = values[j], or None."""
        target = [Fraction(v) * s for v, s in zip(values, self.scales)]
        if any(t.denominator != 1 for t in target):
            return None
        k = len(target)
        if k == 0:
            return linalg.vector([0] * self.n)
        m = linalg.vector(target).dot(self.t)
        y = [Fraction(0)] * self.n
        for i in range(k):
            di = self.d[i] if i < len(self.d) else 0
            if di == 0:
                if m[i] != 0:
                    return None
                continue
            yi = Fraction(m[i]) / di
            if yi.denominator != 1:
                return None
            y[i] = yi
        return linalg.to_int(linalg.vector(y).dot(self.s))

    def vectors(self, values: Sequence, norm) -> List[np.ndarray]:
        """All lattice points of the slice with the given norm, sorted."""
        x0 = self.particular(values)
        if x0 is None:
            return []
        norm = Fraction(norm)
        base = Fraction(x0.dot(self.gram).dot(x0))
        if self.kernel.shape[0] == 0:
            return [x0] if base == norm else []
        lin = x0.dot(self.gram).dot(self.kernel.T) * self.sign
        c = lin.dot(self.form_inv)
        radius = self.sign * (norm - base) + Fraction(c.dot(self.form).dot(c))
        if radius < 0:
            return []
        out = []
        for z, _ in fincke_pohst(self.form, radius, [-x for x in c], exact=True):
            out.append(x0 + z.dot(self.kernel))
        return sorted(out, key=lambda v: tuple(v))


def constrained_vectors(
    lattice: Lattice,
    constraints: Sequence[Tuple[Sequence, Fraction]],
    norm,
    dual: bool = False,
) -> List[np.ndarray]:
    """Vectors v with v.v = norm and v.w_j = c_j.

    Args:
        lattice: Ambient lattice
        constraints: Pairs (w_j, c_j) with w_j in lattice coordinates
        norm: Target norm
        dual: Enumerate in the dual lattice instead (results still in
            lattice coordinates, possibly rational)

    Raises:
        UnsupportedError: If the region is not compact
    """
    n = lattice.rank
    if dual:
        gram = linalg.inverse(lattice.gram)
        funcs = [linalg.vector(w) for w, _ in constraints]
    else:
        gram = lattice.gram
        funcs = [lattice.pairings(w) for w, _ in constraints]
    mat = np.stack(funcs, axis=1) if funcs else linalg.zeros(n, 0)
    sl = AffineSlice(gram, mat)
    found = sl.vectors([c for _, c in constraints], norm)
    if dual:
        return [v.dot(gram) for v in found]
    return found


def fixed_pairing_vectors(
    lattice: Lattice, norm, w: Sequence, pairing, dual: bool = False
) -> List[np.ndarray]:
    """All v (in L, or in the dual when flagged) with v.v = norm and v.w = pairing."""
    return constrained_vectors(lattice, [(w, Fraction(pairing))], norm, dual=dual)


def separating_roots(lattice: Lattice, a: Sequence, b: Sequence) -> List[np.ndarray]:
    """Roots r with r.r = -2, a.r > 0 and b.r < 0 in a hyperbolic lattice.

    Args:
        lattice: Even hyperbolic lattice
        a: Vector of positive norm
        b: Vector of positive norm in the same positive cone as a

    Raises:
        ValueError: If a or b is outside the positive cone
    """
    a = linalg.primitive_vector(linalg.to_int(linalg.vector(a) * linalg.denominator(linalg.vector(a))))
    b = linalg.primitive_vector(linalg.to_int(linalg.vector(b) * linalg.denominator(linalg.vector(b))))
    aa, bb, ab = lattice.norm(a), lattice.norm(b), lattice.product(a, b)
    if aa <= 0 or bb <= 0 or ab <= 0:
        raise ValueError("a and b must lie in the same positive cone")
    det = aa * bb - ab * ab
    if det == 0:
        return []
    bound = 2 * abs(det)
    sl = AffineSlice(lattice.gram, np.stack([lattice.pairings(a), lattice.pairings(b)], axis=1))
    out: List[np.ndarray] = []
    s = 1
    while bb * s * s <= bound:
        t = 1
        while bb * s * s + 2 * ab * s * t + aa * t * t <= bound:
            out.extend(sl.vectors([s, -t], -2))
            t += 1
        s += 1
    return sorted(out, key=lambda v: tuple(v))
