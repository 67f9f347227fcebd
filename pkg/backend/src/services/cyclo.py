"""Cyclotomic polynomials, their mod-2 reductions and Phi_n-lattices.

A Phi_n-lattice is a twist of the principal lattice Z[zeta_n] with the
trace form tr(g1 * conj(g2) / r_n'(zeta + zeta^-1)), where r_n is the
minimal polynomial of zeta + zeta^-1.
"""
import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Matrix, Poly, QQ, ZZ, cyclotomic_poly, divisors, invert, symbols, totient
from sympy import resultant as sympy_resultant
from sympy.ntheory import mobius

from ..config import settings
from ..exceptions import (
    DegenerateLatticeError,
    GlueError,
    NotEvenError,
    UnsupportedError,
)
from ..utils.logger import logger
from . import linalg
from .genus import GenusSymbol, genus_symbol, jordan_decomposition
from .isometries import isometry_test, preserves
from .lattice import Lattice

X = symbols("x")
Y = symbols("y")


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients from the constant term upwards."""

    coefficients: Tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = list(int(c) for c in self.coefficients)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            raise ValueError("the zero polynomial is not allowed")
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def from_sympy(cls, poly: Poly) -> "IntPolynomial":
        return cls(tuple(int(c) for c in reversed(poly.all_coeffs())))

    def to_sympy(self) -> Poly:
        return Poly(list(reversed(self.coefficients)), X, domain=ZZ)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        return IntPolynomial.from_sympy(self.to_sympy() * other.to_sympy())

    def __pow__(self, k: int) -> "IntPolynomial":
        return IntPolynomial.from_sympy(self.to_sympy() ** k)

    def __call__(self, x):
        return sum(c * x ** i for i, c in enumerate(self.coefficients))

    def __str__(self) -> str:
        return str(self.to_sympy().as_expr())


@dataclass(frozen=True)
class ModTwoPolynomial:
    """Polynomial over F_2, coefficients from the constant term upwards."""

    coefficients: Tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = [int(c) % 2 for c in self.coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def from_sympy(cls, poly: Poly) -> "ModTwoPolynomial":
        return cls(tuple(int(c) % 2 for c in reversed(poly.all_coeffs())))

    def to_sympy(self) -> Poly:
        return Poly(list(reversed(self.coefficients)) or [0], X, modulus=2)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __mul__(self, other: "ModTwoPolynomial") -> "ModTwoPolynomial":
        return ModTwoPolynomial.from_sympy(self.to_sympy() * other.to_sympy())

    def __str__(self) -> str:
        terms = [("x^%d" % i if i > 1 else ("x" if i == 1 else "1"))
                 for i in reversed(range(len(self.coefficients))) if self.coefficients[i]]
        return " + ".join(terms) or "0"


def cyclotomic(m: int) -> IntPolynomial:
    """The m-th cyclotomic polynomial."""
    if m < 1:
        raise ValueError(f"cyclotomic index must be positive, got {m}")
    return IntPolynomial.from_sympy(Poly(cyclotomic_poly(m, X), X))


def product(polys: Sequence[IntPolynomial]) -> IntPolynomial:
    return reduce(lambda a, b: a * b, polys, IntPolynomial((1,)))


def mod2(p: IntPolynomial) -> ModTwoPolynomial:
    return ModTwoPolynomial(p.coefficients)


def resultant(p: IntPolynomial, q: IntPolynomial) -> int:
    return int(sympy_resultant(p.to_sympy().as_expr(), q.to_sympy().as_expr(), X))


def glue_bound(n: int, mu: IntPolynomial) -> int:
    """|res(Phi_n, mu)|, which every equivariant glue order divides.

    Raises:
        GlueError: If mu shares a factor with Phi_n
    """
    phi = cyclotomic(n)
    if phi.to_sympy().gcd(mu.to_sympy()).degree() > 0:
        raise GlueError(f"mu shares a factor with Phi_{n}; the glue bound is undefined")
    return abs(resultant(phi, mu))


# ---------------------------------------------------------------------------
# Mod-2 factor calculus
# ---------------------------------------------------------------------------

ALLOWED_FACTORS = (1, 3, 5, 7, 9)


@lru_cache(maxsize=None)
def _irreducible_parts(k: int) -> Tuple[ModTwoPolynomial, ...]:
    _, factors = mod2(cyclotomic(k)).to_sympy().factor_list()
    return tuple(sorted((ModTwoPolynomial.from_sympy(f) for f, _ in factors),
                        key=lambda f: f.coefficients))


@dataclass(frozen=True)
class Mod2Decomposition:
    """mod2(p) written as a product of F_k, or the first factor outside them."""

    polynomial: ModTwoPolynomial
    exponents: Dict[int, int] = field(default_factory=dict)
    offending: Optional[ModTwoPolynomial] = None

    @property
    def ok(self) -> bool:
        return self.offending is None

    def divisible_by(self, required: Dict[int, int]) -> bool:
        return all(self.exponents.get(k, 0) >= e for k, e in required.items())

    def render(self) -> str:
        if not self.ok:
            return f"refused: factor {self.offending}"
        parts = [f"F{k}" + (f"^{e}" if e > 1 else "")
                 for k, e in sorted(self.exponents.items(), reverse=True) if e]
        return "*".join(parts) or "1"


def mod2_factor_check(p: IntPolynomial) -> Mod2Decomposition:
    """Decompose p mod 2 over F1, F3, F5, F7, F9 or name an offending factor."""
    target = mod2(p)
    _, factors = target.to_sympy().factor_list()
    counts: Counter = Counter()
    for f, e in factors:
        counts[ModTwoPolynomial.from_sympy(f)] += e
    exponents = {}
    for k in ALLOWED_FACTORS:
        parts = _irreducible_parts(k)
        e = min(counts[f] for f in parts)
        exponents[k] = e
        for f in parts:
            counts[f] -= e
    leftover = sorted((f for f, c in counts.items() if c > 0), key=lambda f: f.coefficients)
    if leftover:
        return Mod2Decomposition(target, exponents, leftover[0])
    return Mod2Decomposition(target, exponents)


def shares_factor_mod2(p: IntPolynomial, q: IntPolynomial) -> bool:
    """True if p and q have a common irreducible factor modulo 2."""
    return mod2(p).to_sympy().gcd(mod2(q).to_sympy()).degree() > 0


# ---------------------------------------------------------------------------
# Principal lattices and twists
# ---------------------------------------------------------------------------


def ramanujan_sum(n: int, m: int) -> int:
    """Trace of zeta_n^m from Q(zeta_n) to Q."""
    g = gcd(n, m % n) if m % n else n
    return sum(int(mobius(n // d)) * d for d in divisors(g))


@lru_cache(maxsize=None)
def real_subfield_polynomial(n: int) -> IntPolynomial:
    """Minimal polynomial r_n of zeta_n + zeta_n^-1."""
    coeffs = cyclotomic(n).coefficients
    m = (len(coeffs) - 1) // 2
    dickson = [Poly(2, Y, domain=ZZ), Poly(Y, Y, domain=ZZ)]
    r = Poly(coeffs[m], Y, domain=ZZ)
    for k in range(1, m + 1):
        while len(dickson) <= k:
            dickson.append(Poly(Y, Y) * dickson[-1] - dickson[-2])
        r = r + coeffs[m + k] * dickson[k]
    return IntPolynomial(tuple(int(c) for c in reversed(r.all_coeffs())))


def _in_field(n: int, poly_in_tau: Poly) -> Poly:
    """Substitute tau = x + x^(n-1) and reduce modulo Phi_n."""
    phi = Poly(cyclotomic_poly(n, X), X, domain=QQ)
    expr = poly_in_tau.as_expr().subs(Y, X + X ** (n - 1))
    return Poly(expr, X, domain=QQ).rem(phi)


def _trace_gram(n: int, element: Poly) -> np.ndarray:
    """Gram of tr(e * g1 * conj(g2)) on the power basis of Z[zeta_n]."""
    d = int(totient(n))
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(element.all_coeffs())]
    coeffs += [Fraction(0)] * (d - len(coeffs))
    rows = [[sum(c * ramanujan_sum(n, i - j + k) for k, c in enumerate(coeffs) if c)
             for j in range(d)] for i in range(d)]
    return linalg.frac_matrix(rows, d)


@lru_cache(maxsize=None)
def _twist_basis(n: int) -> Tuple[np.ndarray, ...]:
    """Grams of the twists by tau^k, k < deg(r_n)."""
    r = Poly(list(reversed(real_subfield_polynomial(n).coefficients)), Y, domain=QQ)
    phi = Poly(cyclotomic_poly(n, X), X, domain=QQ)
    inv = Poly(invert(_in_field(n, r.diff(Y)).as_expr(), phi.as_expr(), X), X, domain=QQ)
    out = []
    for k in range(r.degree()):
        tau_k = _in_field(n, Poly(Y ** k, Y, domain=QQ))
        out.append(_trace_gram(n, (tau_k * inv).rem(phi)))
    return tuple(out)


def companion_matrix(p: IntPolynomial) -> np.ndarray:
    """Multiplication by x on the power basis (rows are images)."""
    d = p.degree
    m = linalg.zeros(d, d)
    for i in range(d - 1):
        m[i, i + 1] = 1
    for j in range(d):
        m[d - 1, j] = -p.coefficients[j]
    return m


def characteristic_polynomial(g: np.ndarray) -> IntPolynomial:
    return IntPolynomial.from_sympy(Matrix(g.tolist()).charpoly(X))


@dataclass(frozen=True)
class TwistElement:
    """a in Z[zeta + zeta^-1] by coordinates in the powers of zeta + zeta^-1."""

    coordinates: Tuple[int, ...]

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coordinates):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*t" + (f"^{k}" if k > 1 else ""))
        return " + ".join(terms) or "0"


@dataclass(frozen=True, eq=False)
class PhiLattice:
    """A lattice with an isometry of characteristic polynomial Phi_n.

    ``exact_class`` is False when it stands for a genus only (indefinite
    twists are compared by genus symbol).
    """

    lattice: Lattice
    isometry: np.ndarray = field(repr=False)
    n: int
    twist: TwistElement = TwistElement((1,))
    exact_class: bool = True

    def is_valid(self) -> bool:
        return (preserves(self.isometry, self.lattice.gram)
                and characteristic_polynomial(self.isometry) == cyclotomic(self.n)
                and self.lattice.is_even())


def _twist_gram(n: int, coords: Sequence[int]) -> np.ndarray:
    basis = _twist_basis(n)
    if len(coords) > len(basis):
        raise ValueError(f"twist for Phi_{n} takes at most {len(basis)} coordinates")
    d = basis[0].shape[0]
    g = linalg.frac_matrix([[0] * d for _ in range(d)], d)
    for c, b in zip(coords, basis):
        if c:
            g = g + int(c) * b
    return g


def principal_phi_lattice(n: int) -> PhiLattice:
    """The principal Phi_n-lattice with multiplication by zeta_n.

    Raises:
        UnsupportedError: If n <= 2
    """
    if n <= 2:
        raise UnsupportedError(f"Phi_n-lattices need n > 2, got {n}")
    lat = Lattice(_twist_gram(n, (1,)), f"L0(Phi{n})")
    return PhiLattice(lat, companion_matrix(cyclotomic(n)), n)


def twist(phi_lattice: PhiLattice, a: TwistElement) -> PhiLattice:
    """Twist of the principal lattice by a: <g1, g2>_a = <a g1, g2>_0.

    Raises:
        DegenerateLatticeError: If the twisted form is degenerate
        NotEvenError: If it is not even
    """
    n = phi_lattice.n
    gram = _twist_gram(n, a.coordinates)
    if linalg.determinant(gram) == 0:
        raise DegenerateLatticeError(f"twist by {a} is degenerate")
    lat = Lattice(gram, f"L0(Phi{n})({a})")
    if not lat.is_even():
        raise NotEvenError(f"twist by {a} is not even")
    return PhiLattice(lat, phi_lattice.isometry, n, a)


@dataclass(frozen=True)
class PhiConstraints:
    """Search window for Phi_n-lattices.

    ``two_rank`` bounds the rank of the scale-2 Jordan constituent.
    """

    det_divisor: Optional[int]
    signatures: Optional[Tuple[Tuple[int, int], ...]] = None
    max_signature: Optional[Tuple[int, int]] = None
    two_rank: Optional[Tuple[int, int]] = None
    coefficient_bound: Optional[int] = None

    def admits(self, lattice: Lattice) -> bool:
        det = lattice.determinant()
        if self.det_divisor % int(abs(det)):
            return False
        sig = lattice.signature()
        if self.signatures is not None and sig not in self.signatures:
            return False
        if self.max_signature is not None and (sig[0] > self.max_signature[0] or sig[1] > self.max_signature[1]):
            return False
        if self.two_rank is not None:
            try:
                c = jordan_decomposition(lattice, 2).constituent(1)
            except UnsupportedError:
                return False
            rank = c.rank if c else 0
            if not self.two_rank[0] <= rank <= self.two_rank[1]:
                return False
        return True


def enumerate_phi_lattices(n: int, constraints: PhiConstraints) -> List[PhiLattice]:
    """All Phi_n-twists meeting the constraints, one per isometry class.

    Twist elements range over a coordinate box; definite results are
    separated by isometry testing, indefinite ones by genus symbol.

    Raises:
        UnsupportedError: If no determinant bound is given, or n <= 2
    """
    if constraints.det_divisor is None:
        raise UnsupportedError("Phi_n-lattice enumeration needs a determinant bound")
    principal = principal_phi_lattice(n)
    bound = constraints.coefficient_bound or settings.twist_coefficient_bound
    k = len(_twist_basis(n))
    classes: Dict[str, List[PhiLattice]] = {}
    seen = 0
    for coords in itertools.product(range(-bound, bound + 1), repeat=k):
        if not any(coords):
            continue
        gram = _twist_gram(n, coords)
        det = linalg.determinant(gram)
        if det == 0 or det.denominator != 1 or constraints.det_divisor % abs(det.numerator):
            continue
        if not linalg.is_integral(gram) or any(gram[i, i] % 2 for i in range(gram.shape[0])):
            continue
        a = TwistElement(tuple(coords))
        lat = Lattice(gram, f"L0(Phi{n})({a})")
        if not constraints.admits(lat):
            continue
        seen += 1
        symbol = str(genus_symbol(lat))
        bucket = classes.setdefault(symbol, [])
        if not lat.is_definite():
            if not bucket:
                bucket.append(PhiLattice(lat, principal.isometry, n, a, exact_class=False))
            continue
        if any(isometry_test(lat, other.lattice) is not None for other in bucket):
            continue
        bucket.append(PhiLattice(lat, principal.isometry, n, a))
    logger.info(f"Phi_{n}: {seen} admissible twists in box {bound}, "
                f"{sum(len(b) for b in classes.values())} classes")
    return [p for symbol in sorted(classes) for p in classes[symbol]]


def phi_genera(lattices: Sequence[PhiLattice]) -> List[GenusSymbol]:
    """Distinct genus symbols among Phi_n-lattices, sorted by rendering."""
    symbols_ = {str(s): s for s in (genus_symbol(p.lattice) for p in lattices)}
    return [symbols_[k] for k in sorted(symbols_)]


# ---------------------------------------------------------------------------
# Admissible orders
# ---------------------------------------------------------------------------

MAX_FACTOR_DEGREE = 8
CHARPOLY_DEGREE = 12
F9_COMPANIONS = {1: 2, 3: 1, 9: 1}
PHI8_FORBIDDEN_GENUS = "II_(2,2)2^2 9^1"


@lru_cache(maxsize=None)
def phi8_obstruction() -> bool:
    """True if no Phi_8-twist lies in the genus II_(2,2)2^2 9^1."""
    target = GenusSymbol.parse(PHI8_FORBIDDEN_GENUS)
    found = enumerate_phi_lattices(8, PhiConstraints(det_divisor=abs(target.determinant()), signatures=((2, 2),)))
    return all(str(genus_symbol(p.lattice)) != str(target) for p in found)


def _index_multisets(indices: Sequence[int], degree: int, start: int = 0):
    if degree == 0:
        yield ()
        return
    for i in range(start, len(indices)):
        d = int(totient(indices[i]))
        if d <= degree:
            for rest in _index_multisets(indices, degree - d, i):
                yield (indices[i],) + rest


def candidate_polynomials(max_factor_degree: int = MAX_FACTOR_DEGREE) -> List[Tuple[int, ...]]:
    """Index multisets of degree-12 products of Phi_m with deg Phi_m <= max_factor_degree."""
    indices = [m for m in range(1, 61) if int(totient(m)) <= max_factor_degree]
    return list(_index_multisets(indices, CHARPOLY_DEGREE))


def admissible_orders(inherited_bound: Sequence[int], max_factor_degree: int = MAX_FACTOR_DEGREE) -> List[int]:
    """Orders allowed by the mod-2 factor filters.

    Args:
        inherited_bound: Integers one of which every order must divide
        max_factor_degree: Degree bound for the cyclotomic factors

    Returns:
        Sorted list of orders
    """
    orders = set()
    for multiset in candidate_polynomials(max_factor_degree):
        dec = mod2_factor_check(product([cyclotomic(m) for m in multiset]))
        if not dec.ok:
            continue
        has_f9 = dec.exponents.get(9, 0) > 0
        if has_f9 and not dec.divisible_by(F9_COMPANIONS):
            continue
        order = reduce(lcm, multiset, 1)
        if has_f9 and order % 8 == 0 and phi8_obstruction():
            continue
        if not any(b % order == 0 for b in inherited_bound):
            continue
        orders.add(order)
    return sorted(orders)
