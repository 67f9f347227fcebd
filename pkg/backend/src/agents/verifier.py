"""Machine-checked replay of the case analyses behind the F15, F9 and F7 claims."""
import random
from functools import lru_cache
from math import isqrt
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint, totient
from sympy.combinatorics.named_groups import SymmetricGroup

from ..config import settings
from ..exceptions import ChamberBudgetExceeded, FixtureError
from ..models.fixtures import ExternalFacts, load_external_facts, load_fixture_spec
from ..models.reports import BorcherdsReport, ClaimStatus, TraceRow, VerificationReport
from ..services import linalg
from ..services.cyclo import (
    PhiConstraints,
    admissible_orders,
    candidate_polynomials,
    characteristic_polynomial,
    cyclotomic,
    enumerate_phi_lattices,
    mod2,
    mod2_factor_check,
    phi8_obstruction,
    phi_genera,
    product,
    resultant,
    shares_factor_mod2,
)
from ..services.genus import (
    GenusSymbol,
    JordanConstituent,
    JordanSymbol,
    all_genera,
    complement_genus,
    cyclic_glue_genera,
    enumerate_definite_genus,
    find_sublattice_in_genus,
    genus_symbol,
    has_roots,
    is_direct_summand,
    jordan_decomposition,
    orthogonal_genus,
    phi3_symbol_constraint,
    symbol_difference,
)
from ..services.isometries import isometry_test
from ..services.lattice import Lattice, direct_sum
from ..services.root_lattices import cartan_a, cartan_d, cartan_e, d_plus, hyperbolic_plane
from ..utils.logger import logger

CLAIMS = ("f15", "f9", "f7", "headline")

# Orders of the mod-2 images and the symmetric degree per Enriques setup
SETUP_IMAGES = {"rho16": (120, 5), "f7": (5040, 7), "rho18": (362880, 9)}
# Which F_k each setup must realize in the mod-2 characteristic polynomial of some element
SETUP_FACTORS = {"rho16": (5,), "f7": (7,), "rho18": (7, 9)}
ORDER_BOUND = (36, 48, 56, 84, 120)
EXCLUDED_ORDERS = (45, 72, 90)


def _a2(n: int) -> Lattice:
    return cartan_a(2).rescale(n)


def n_lattice() -> Lattice:
    """U + U(2) + E8(-2), the anti-invariant lattice of the Enriques involution."""
    u = hyperbolic_plane()
    return Lattice(direct_sum(u, u.rescale(2), cartan_e(8).rescale(-2)).gram, "N")


# Seed lattice and index steps (prime, codimension, intermediate genus) for
# the definite genera whose single class is checked for roots.
DEFINITE_RECIPES = {
    "II_(0,6)2^4 7^1": (lambda: cartan_a(6).rescale(-1), ((2, 2, None),)),
    "II_(0,6)2^-4 3^1": (lambda: direct_sum(_a2(-1), cartan_d(4).rescale(-1)), ((2, 1, None),)),
    "II_(0,6)2^-4 3^-3": (
        lambda: direct_sum(_a2(-1), cartan_d(4).rescale(-1)),
        ((3, 1, "II_(0,6)2^-2 3^-3"), (2, 1, None)),
    ),
    "II_(0,4)2^2 3^2": (lambda: direct_sum(_a2(-1), _a2(-1)), ((2, 1, None),)),
}


def _show(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (GenusSymbol, JordanSymbol)):
        return value.render()
    if isinstance(value, (list, tuple, set, frozenset)):
        return "[" + ", ".join(_show(v) for v in value) + "]"
    if value is None:
        return "-"
    return str(value)


class ClaimTrace:
    """Rows of one verification, in the order they were checked."""

    def __init__(self, claim_id: str, facts: ExternalFacts):
        self.claim_id = claim_id
        self.facts = facts
        self.rows: List[TraceRow] = []

    def check(self, step: str, computed: Any, expected: Any) -> bool:
        c, e = _show(computed), _show(expected)
        ok = c == e
        self.rows.append(TraceRow(
            step=step, computed=c, expected=e,
            status=ClaimStatus.VERIFIED if ok else ClaimStatus.REFUTED,
        ))
        if not ok:
            logger.warning(f"{self.claim_id}: '{step}' gave {c}, expected {e}")
        return ok

    def external(self, key: str) -> None:
        fact = self.facts.fact(key)
        self.rows.append(TraceRow(
            step=fact.statement, computed="assumed", expected="assumed",
            status=ClaimStatus.EXTERNAL_FACT, citation=fact.citation,
        ))

    def report(self) -> VerificationReport:
        refuted = any(r.status == ClaimStatus.REFUTED for r in self.rows)
        status = ClaimStatus.REFUTED if refuted else ClaimStatus.VERIFIED
        logger.info(f"claim {self.claim_id}: {status.value} ({len(self.rows)} rows)")
        return VerificationReport(claim_id=self.claim_id, status=status, trace=self.rows)


@lru_cache(maxsize=None)
def definite_representative(target: str) -> Optional[Lattice]:
    """A lattice in one of the definite genera of DEFINITE_RECIPES, or None."""
    if target not in DEFINITE_RECIPES:
        raise KeyError(f"no representative recipe for {target}")
    seed, steps = DEFINITE_RECIPES[target]
    current = seed()
    for p, codim, intermediate in steps:
        goal = GenusSymbol.parse(intermediate or target)
        current = find_sublattice_in_genus(current, goal, p=p, codim=codim)
        if current is None:
            logger.warning(f"no index-{p}^{codim} sublattice in {goal.render()}")
            return None
    return current


@lru_cache(maxsize=None)
def definite_classes(target: str) -> Tuple[int, bool]:
    """(number of classes, roots in the first class) for a recipe genus."""
    rep = definite_representative(target)
    if rep is None:
        return 0, False
    classes = enumerate_definite_genus(rep)
    return len(classes), has_roots(classes[0])


def indefinite_representative(target: GenusSymbol, head: Lattice, bound: int = 4) -> Optional[Lattice]:
    """head + [[2a, b], [b, 2c]] in the target genus, with |a|, |b|, |c| <= bound."""
    det = target.determinant() / head.determinant()
    for a in range(-bound, bound + 1):
        for b in range(0, bound + 1):
            for c in range(-bound, bound + 1):
                if 4 * a * c - b * b != det:
                    continue
                candidate = head.direct_sum(Lattice.from_rows([[2 * a, b], [b, 2 * c]]))
                if genus_symbol(candidate).render() == target.render():
                    return candidate
    return None


def phi3_two_adic_candidates(rank: int, max_scale: int) -> List[JordanSymbol]:
    """Completely even 2-adic symbols of the given rank allowed for a Phi_3-lattice."""
    out = []

    def fill(scale: int, left: int, cons: Tuple[JordanConstituent, ...]):
        if scale > max_scale:
            if left == 0:
                symbol = JordanSymbol(2, cons)
                if phi3_symbol_constraint(symbol):
                    out.append(symbol)
            return
        for r in range(left, -1, -2):
            for sign in ((1, -1) if r else (1,)):
                fill(scale + 1, left - r, cons + (JordanConstituent(scale, r, sign),))

    fill(0, rank, ())
    return out


def scale_2_rank(lattice: Lattice) -> int:
    """Rank of the scale-2 constituent of the 2-adic Jordan decomposition."""
    c = jordan_decomposition(lattice, 2).constituent(1)
    return c.rank if c else 0


def two_rank_window(lattice: Lattice, degree: int) -> Tuple[int, int]:
    """Bounds on the scale-2 rank of a rank-``degree`` summand with trivial glue.

    The complement has rank ``lattice.rank - degree`` and can absorb at most
    that many scale-2 directions.
    """
    n2 = scale_2_rank(lattice)
    return max(n2 - (lattice.rank - degree), 0), min(n2, degree)


def _valuation(n: int, p: int) -> int:
    n, v = abs(int(n)), 0
    while n and n % p == 0:
        n //= p
        v += 1
    return v


def _mod2_word(generators: Sequence[np.ndarray], word: Sequence[int]) -> np.ndarray:
    m = np.identity(generators[0].shape[0], dtype=np.int64)
    for i in word:
        m = m.dot(generators[i]) % 2
    return m


def word_with_factor(generators: Sequence[Sequence[Sequence[int]]], k: int, seed: int,
                     tries: int = 2000) -> Optional[List[int]]:
    """A word in the generators whose mod-2 characteristic polynomial contains F_k."""
    if not generators:
        return None
    gens = [np.array(g, dtype=np.int64) % 2 for g in generators]
    rng = random.Random(seed + k)
    for _ in range(tries):
        word = [rng.randrange(len(gens)) for _ in range(rng.randint(1, 12))]
        m = _mod2_word(gens, word)
        dec = mod2_factor_check(characteristic_polynomial(linalg.int_matrix(m.tolist())))
        if dec.exponents.get(k, 0) > 0:
            return word
    return None


class ClaimVerifier:
    """Replays the claims from lattice computations and recorded external facts.

    Every verification returns a report whose rows say what was computed and
    what the claim states; statements taken from the literature appear as
    external-fact rows with their citation.
    """

    def __init__(self, facts: Optional[ExternalFacts] = None):
        """Initialize the verifier.

        Args:
            facts: External facts. Defaults to fixture_dir/external_facts.json
        """
        self._facts = facts

    @property
    def facts(self) -> ExternalFacts:
        if self._facts is None:
            self._facts = load_external_facts(settings.fixture_path / "external_facts.json")
        return self._facts

    def verify(
        self,
        claim_id: str,
        progress_callback: Optional[Callable[[str, Any], None]] = None,
    ) -> VerificationReport:
        """Run one claim by id.

        Raises:
            FixtureError: If the claim id is unknown
        """
        handlers = {
            "f15": self.verify_f15_exclusion,
            "f9": self.verify_f9_analysis,
            "f7": self.verify_f7_analysis,
            "headline": lambda: self.verify_headline(progress_callback=progress_callback),
        }
        if claim_id not in handlers:
            raise FixtureError(f"unknown claim '{claim_id}', expected one of {', '.join(CLAIMS)}")
        self._send_progress(progress_callback, "claim_started", {"claim": claim_id})
        report = handlers[claim_id]()
        self._send_progress(progress_callback, "claim_finished", {"claim": claim_id, "status": report.status.value})
        return report

    # ------------------------------------------------------------------
    # F15
    # ------------------------------------------------------------------

    def verify_f15_exclusion(self) -> VerificationReport:
        """F15 never divides the mod-2 minimal polynomial of f."""
        t = ClaimTrace("f15", self.facts)
        n = n_lattice()
        n_genus = genus_symbol(n)
        t.check("genus of N", n_genus, "II_(2,10)2^10")

        t.external("hor_degree_bound")
        small = [m for m in range(1, 61) if int(totient(m)) <= self.facts.max_factor_degree]
        f15 = cyclotomic(15)
        t.check("Phi_m of degree <= 8 sharing a factor with F15 mod 2",
                [m for m in small if shares_factor_mod2(cyclotomic(m), f15)], [15, 30])
        t.check("res(Phi15, Phi1)", abs(resultant(f15, cyclotomic(1))), 1)
        t.check("res(Phi15, Phi3)", abs(resultant(f15, cyclotomic(3))), 25)

        # trivial glue: N = N15 + N15-perp
        window = two_rank_window(n, int(totient(15)))
        t.check("2-modular rank window of N15 (trivial glue)", f"{window[0]}..{window[1]}", "6..8")
        trivial = enumerate_phi_lattices(15, PhiConstraints(
            det_divisor=2 ** scale_2_rank(n), signatures=((0, 8), (2, 6)), two_rank=window))
        t.check("Phi15-lattice classes with trivial glue", len(trivial), 1)
        e8 = cartan_e(8).rescale(-2)
        t.check("the class is E8(-2)",
                len(trivial) == 1 and isometry_test(trivial[0].lattice, e8) is not None, True)
        t.check("genus of E8(-2)", genus_symbol(e8), "II_(0,8)2^8")
        perp = complement_genus(n_genus, genus_symbol(e8))
        t.check("genus of N15-perp", perp, "II_(2,2)2^2")
        u = hyperbolic_plane()
        t.check("genus of U + U(2)", genus_symbol(u.direct_sum(u.rescale(2))), perp)
        t.external("cs_unique_indefinite")
        t.external("oguiso_yu_spectral_radius")
        res_13 = abs(resultant(f15, product([cyclotomic(1), cyclotomic(3)])))
        t.check("res(Phi15, Phi1 Phi3)", res_13, 25)
        h15_det = int(abs(direct_sum(e8, e8).determinant()))
        t.check("H15 has no glue over 2 or 3", res_13 % 2 == 1 and res_13 % 3 != 0 and h15_det % 3 != 0, True)
        t.external("rank16_unimodular")
        candidates = [direct_sum(cartan_e(8), cartan_e(8)).rescale(-1), d_plus(16).rescale(-1)]
        t.check("E8(-1)^2 and D16+(-1) are even unimodular",
                [c.is_even() and c.is_unimodular() for c in candidates], [True, True])
        t.check("E8(-1)^2 and D16+(-1) have roots", [has_roots(c) for c in candidates], [True, True])
        t.external("root_orbit_contradiction")

        # nontrivial glue
        wide = enumerate_phi_lattices(15, PhiConstraints(
            det_divisor=2 ** 10 * 5 ** 4, signatures=((0, 8), (2, 6))))
        dets = [int(abs(p.lattice.determinant())) for p in wide]
        t.check("5-adic valuation of det N15 is even", all(_valuation(d, 5) % 2 == 0 for d in dets), True)
        # N is 5-unimodular, so the 5-parts of both discriminant groups are
        # isomorphic to G, and |G| divides res(Phi15, Phi1 Phi3) = 25.
        glue = sorted({5 ** _valuation(d, 5) for d in dets if 0 < _valuation(d, 5) <= 2})
        t.check("|G|", glue, [25])
        glued = [p for p, d in zip(wide, dets) if _valuation(d, 5) == 2 and _valuation(d, 2) >= 10 - 4]
        t.check("det N15", sorted({int(abs(p.lattice.determinant())) for p in glued}), [2 ** 8 * 5 ** 2])
        genera = phi_genera(glued)
        t.check("genus of N15", genera, ["II_(2,6)2^8 5^-2"])
        if len(genera) != 1:
            return t.report()
        perp = complement_genus(n_genus, genera[0], glue_primes=(5,))
        t.check("genus of N15-perp", perp, "II_(0,4)2^2 5^-2")
        t.check("res(Phi3, Phi1)", abs(resultant(cyclotomic(3), cyclotomic(1))), 3)
        perp_2 = perp.local_symbol(2) if perp else None
        t.check("2-adic symbol of N15-perp", perp_2, "1^2 2^2")
        n3 = phi3_two_adic_candidates(2, 1)
        t.check("2-adic symbols of N3", n3, ["1^-2", "2^-2"])
        t.check("N3 candidates that are 2-adic summands of N15-perp",
                [s for s in n3 if perp_2 is not None and is_direct_summand(s, perp_2)], [])
        return t.report()

    # ------------------------------------------------------------------
    # F9
    # ------------------------------------------------------------------

    def _single_class_with_roots(self, t: ClaimTrace, target: str) -> None:
        rep = definite_representative(target)
        t.check(f"representative of {target}", genus_symbol(rep) if rep is not None else None, target)
        count, roots = definite_classes(target)
        t.check(f"classes in {target}", count, 1)
        t.check(f"the class of {target} has roots", roots, True)

    def _n1_candidates(self, signature: Tuple[int, int], dets: Sequence[int], two_adic: str) -> List[GenusSymbol]:
        out = []
        for d in dets:
            out += [g for g in all_genera(signature, d) if g.local_symbol(2).render() == two_adic]
        return sorted(out, key=lambda g: g.render())

    def _glue_compatible(self, n3: Lattice, candidates: Sequence[GenusSymbol], target: GenusSymbol) -> List[GenusSymbol]:
        """N1 genera from which N3 + N1 reaches the target, with trivial or order-3 glue."""
        u2 = hyperbolic_plane().rescale(2)
        out = []
        for g in candidates:
            n1 = indefinite_representative(g, u2)
            if n1 is None:
                logger.warning(f"no representative found for {g.render()}")
                continue
            if genus_symbol(n3.direct_sum(n1)).render() == target.render():
                out.append(g)
            elif any(r.render() == target.render() for r in cyclic_glue_genera(n3, n1, 3)):
                out.append(g)
        return out

    def verify_f9_analysis(self) -> VerificationReport:
        """p_N = Phi9 Phi3^k Phi1^(6-2k) leads to N3 = A2(-6) and N1-perp in the genus of A8(-2)."""
        t = ClaimTrace("f9", self.facts)
        n = n_lattice()
        n_genus = genus_symbol(n)
        n_2 = n_genus.local_symbol(2)

        bound = abs(resultant(cyclotomic(9), product([cyclotomic(3), cyclotomic(1)])))
        t.check("res(Phi9, Phi3 Phi1)", bound, 27)
        found = enumerate_phi_lattices(9, PhiConstraints(
            det_divisor=2 ** 6 * bound, signatures=((0, 6), (2, 4)),
            coefficient_bound=max(settings.twist_coefficient_bound, 4)))
        pairs: Dict[str, GenusSymbol] = {}
        for g in phi_genera(found):
            if not is_direct_summand(g.local_symbol(2), n_2):
                continue
            perp = complement_genus(n_genus, g, glue_primes=(3,))
            if perp is not None:
                pairs[g.render()] = perp
        cases = {
            "II_(0,6)2^-6 3^1": "II_(2,4)2^-4 3^-1",
            "II_(0,6)2^-6 3^-3": "II_(2,4)2^-4 3^3",
            "II_(2,4)2^-6 3^-1": "II_(0,6)2^-4 3^1",
            "II_(2,4)2^-6 3^3": "II_(0,6)2^-4 3^-3",
        }
        t.check("genera of N9", sorted(pairs), sorted(cases))
        for n9, expected in cases.items():
            t.check(f"genus of N9-perp for N9 in {n9}", pairs.get(n9), expected)
        for rejected in ("II_(0,6)2^-4 3^1", "II_(0,6)2^-4 3^-3"):
            self._single_class_with_roots(t, rejected)

        # k = 2
        perp_2 = sorted({p.local_symbol(2).render() for p in pairs.values()})
        t.check("2-adic symbol of N9-perp in every case", perp_2, ["1^2 2^-4"])
        n3_rank4 = phi3_two_adic_candidates(4, 1)
        t.check("2-adic symbols of a rank-4 N3", n3_rank4, ["1^4", "1^-2 2^-2", "2^4"])
        perp_symbol = JordanSymbol.parse(2, "1^2 2^-4")
        t.check("rank-4 N3 candidates that are summands of N9-perp",
                [s for s in n3_rank4 if is_direct_summand(s, perp_symbol)], [])

        # k = 0
        t.external("generic_transcendental")
        orders = {g.order() for g in SymmetricGroup(5).elements}
        t.check("elements of order 9 in S5", 9 in orders, False)

        # k = 1: N3 = A2(n)
        divisors = [s * m for m in (1, 2, 3, 6) for s in (-1, 1)]
        n3_bound = 2 ** 2 * abs(resultant(cyclotomic(3), product([cyclotomic(9), cyclotomic(1)])))
        t.check("det N3 divides", n3_bound, 108)
        twists = sorted(m for m in divisors
                        if n3_bound % (3 * m * m) == 0
                        and is_direct_summand(jordan_decomposition(_a2(m), 2), perp_symbol))
        t.check("N3 = A2(n) for n in", twists, [-6, -2, 2, 6])

        # case N9 in II_(0,6)2^-6 3^1
        target_1 = GenusSymbol.parse(cases["II_(0,6)2^-6 3^1"])
        t.check("det N9-perp (first case)", abs(target_1.determinant()), 48)
        small = [m for m in twists if 36 % (3 * m * m) == 0]
        t.check("N3 = A2(n) with det N3 | 2^2 3^2", small, [-2, 2])
        n1_2 = symbol_difference(perp_symbol, jordan_decomposition(_a2(2), 2))
        t.check("2-adic symbol of N1", n1_2, "1^2 2^2")
        positive = self._n1_candidates((0, 4), (4, 36), "1^2 2^2")
        t.check("genera of N1 for N3 = A2(2)", positive, ["II_(0,4)2^2 3^2"])
        self._single_class_with_roots(t, "II_(0,4)2^2 3^2")
        mixed = self._n1_candidates((2, 2), (4, 36), "1^2 2^2")
        t.check("genera of N1 for N3 = A2(-2)", mixed,
                ["II_(2,2)2^2", "II_(2,2)2^2 3^-2", "II_(2,2)2^2 9^-1", "II_(2,2)2^2 9^1"])
        compatible = self._glue_compatible(_a2(-2), mixed, target_1)
        t.check("N1 genera glueing to N9-perp with A2(-2)", compatible, ["II_(2,2)2^2", "II_(2,2)2^2 3^-2"])
        u = hyperbolic_plane()
        t.check("genus of U(2) + U", genus_symbol(u.rescale(2).direct_sum(u)), "II_(2,2)2^2")
        t.external("cs_unique_indefinite")
        t.external("mo1_no_order9")

        # case N9 in II_(0,6)2^-6 3^-3
        t.external("zeta9_ideal")
        norm = 2 ** int(totient(9)) * cyclotomic(9)(1) ** 3
        t.check("norm of 2(1 - zeta9)^3", norm, 2 ** 6 * 3 ** 3)
        divisible = [m for m in twists if (3 * m * m) % 9 == 0]
        t.check("N3 = A2(n) with 9 | det N3", divisible, [-6, 6])
        target_2 = GenusSymbol.parse(cases["II_(0,6)2^-6 3^-3"])
        positive = self._n1_candidates((0, 4), (36,), "1^2 2^2")
        t.check("genera of N1 for N3 = A2(6)", positive, ["II_(0,4)2^2 3^2"])
        mixed = self._n1_candidates((2, 2), (36,), "1^2 2^2")
        t.check("genera of N1 for N3 = A2(-6)", mixed,
                ["II_(2,2)2^2 3^-2", "II_(2,2)2^2 9^-1", "II_(2,2)2^2 9^1"])
        compatible = self._glue_compatible(_a2(-6), mixed, target_2)
        t.check("N1 genera glueing to N9-perp with A2(-6)", compatible, ["II_(2,2)2^2 9^1"])
        a8 = genus_symbol(cartan_a(8).rescale(-2))
        n1_perp = complement_genus(n_genus, compatible[0], glue_primes=(3,)) if compatible else None
        t.check("genus of N1-perp equals the genus of A8(-2)", n1_perp, a8)

        # F1^2 F3 F9 divides p_f mod 2
        two_part = [d for d in a2_discriminant_orders(-6) if d % 2 == 0]
        t.check("2-primary orders of the discriminant of A2(-6)", two_part, [2, 2])
        dec = mod2_factor_check(product([cyclotomic(9), cyclotomic(3)] + [cyclotomic(1)] * 4))
        t.check("Phi9 Phi3 Phi1^4 mod 2", dec.render(), "F9*F3*F1^4")
        t.check("F1^2 F3 F9 divides it", dec.divisible_by({1: 2, 3: 1, 9: 1}), True)
        return t.report()

    # ------------------------------------------------------------------
    # F7
    # ------------------------------------------------------------------

    def verify_f7_analysis(self) -> VerificationReport:
        """p_N = Phi7 Phi1^6 forces N7 = A6(-2) and NS(X) in II_(1,15)2^4 7^1."""
        t = ClaimTrace("f7", self.facts)
        n = n_lattice()
        n_genus = genus_symbol(n)
        phi7 = cyclotomic(7)
        t.check("res(Phi1, Phi7)", abs(resultant(cyclotomic(1), phi7)), 7)
        t.check("|Phi7(1) Phi7(-1)|", abs(phi7(1) * phi7(-1)), 7)

        found = enumerate_phi_lattices(7, PhiConstraints(
            det_divisor=2 ** 6 * 7, signatures=((0, 6), (2, 4)),
            coefficient_bound=max(settings.twist_coefficient_bound, 4)))
        pairs: Dict[str, GenusSymbol] = {}
        for g in phi_genera(found):
            if not is_direct_summand(g.local_symbol(2), n_genus.local_symbol(2)):
                continue
            perp = complement_genus(n_genus, g, glue_primes=(7,))
            if perp is not None:
                pairs[g.render()] = perp
        t.check("7 divides det N7", all(abs(GenusSymbol.parse(g).determinant()) % 7 == 0 for g in pairs), True)
        indices = sorted({isqrt(abs(GenusSymbol.parse(g).determinant() * p.determinant()) // abs(n_genus.determinant()))
                          for g, p in pairs.items()})
        t.check("[N : N7 + N1]", indices, [7])
        cases = {"II_(2,4)2^6 7^-1": "II_(0,6)2^4 7^1", "II_(0,6)2^6 7^1": "II_(2,4)2^4 7^-1"}
        t.check("genera of N7", sorted(pairs), sorted(cases))
        for n7, expected in cases.items():
            t.check(f"genus of N1 for N7 in {n7}", pairs.get(n7), expected)
        self._single_class_with_roots(t, "II_(0,6)2^4 7^1")
        t.external("cs_unique_indefinite")

        ns = orthogonal_genus(GenusSymbol.parse(cases["II_(0,6)2^6 7^1"]))
        t.check("genus of the invariant part of NS(X)", ns, "II_(1,15)2^4 7^1")
        t.check("genus of A6(-2)", genus_symbol(cartan_a(6).rescale(-2)), "II_(0,6)2^6 7^1")
        return t.report()

    # ------------------------------------------------------------------
    # Headline
    # ------------------------------------------------------------------

    def verify_headline(
        self,
        runs: Optional[Dict[str, BorcherdsReport]] = None,
        progress_callback: Optional[Callable[[str, Any], None]] = None,
    ) -> VerificationReport:
        """Factor list and order list, with F7 and F9 realized by the Borcherds runs.

        Args:
            runs: Borcherds reports per setup name; missing ones are computed
            progress_callback: Optional callback(event_type, data)
        """
        t = ClaimTrace("headline", self.facts)
        t.external("hor_mod2_closure")
        f15 = cyclotomic(15)
        outside = []
        for multiset in candidate_polynomials(self.facts.max_factor_degree):
            dec = mod2_factor_check(product([cyclotomic(m) for m in multiset]))
            if not dec.ok:
                outside.append((multiset, dec))
        t.check("candidates leaving F1..F9 all contain Phi15 or Phi30",
                all(15 in m or 30 in m for m, _ in outside), True)
        t.check("their offending factor divides F15",
                all(shares_factor_mod2(product([cyclotomic(m) for m in ms]), f15)
                    and _divides_mod2(dec.offending, f15) for ms, dec in outside), True)

        runs = dict(runs or {})
        for name in SETUP_IMAGES:
            if name not in runs:
                runs[name] = self._run_setup(name, progress_callback)
        for name, (order, degree) in SETUP_IMAGES.items():
            report = runs[name]
            t.check(f"mod-2 image order ({name})", report.mod2_order, order)
            t.check(f"image is S_{degree} ({name})", report.symmetric_degree, degree)
            for k in SETUP_FACTORS[name]:
                word = word_with_factor(report.generators, k, settings.seed)
                t.check(f"element with F{k} in its mod-2 characteristic polynomial ({name})",
                        word is not None, True)
        t.external("dolgachev16_examples")

        t.external("hor_order_bound")
        orders = admissible_orders(self.facts.inherited_bound, self.facts.max_factor_degree)
        t.check("admissible orders", len(orders), 28)
        t.check("realized orders are admissible",
                [o for o in self.facts.realized_orders if o not in orders], [])
        t.check("orders 45, 72, 90 excluded", [o for o in EXCLUDED_ORDERS if o in orders], [])
        t.check("Phi8 twists avoid II_(2,2)2^2 9^1", phi8_obstruction(), True)
        t.check("every order divides one of 36, 48, 56, 84, 120",
                [o for o in orders if not any(b % o == 0 for b in ORDER_BOUND)], [])
        return t.report()

    def _run_setup(self, name: str, progress_callback) -> BorcherdsReport:
        from ..services.chambers import load_setup
        from ..services.fixture_builder import load_or_build, spec_path
        from .borcherds_engine import main_borcherds

        fixture = load_or_build(load_fixture_spec(spec_path(name)))
        self._send_progress(progress_callback, "setup_started", {"setup": name})
        try:
            return main_borcherds(load_setup(fixture), progress_callback=progress_callback)
        except ChamberBudgetExceeded as exc:
            if exc.partial is None:
                raise
            logger.warning(f"{name}: {exc}")
            return exc.partial

    def _send_progress(
        self,
        callback: Optional[Callable[[str, Any], None]],
        event_type: str,
        data: Any,
    ) -> None:
        if callback:
            try:
                callback(event_type, data)
            except Exception as exc:
                logger.debug(f"progress callback failed: {exc}")


def a2_discriminant_orders(n: int) -> List[int]:
    """Prime-power orders of the cyclic factors of the discriminant group of A2(n)."""
    form = _a2(n).discriminant_form()
    return sorted(p ** e for d in form.orders for p, e in factorint(d).items())


def _divides_mod2(factor, target) -> bool:
    if factor is None:
        return True
    return mod2(target).to_sympy().rem(factor.to_sympy()).is_zero

