"""Tests for cyclotomic polynomials, the mod-2 calculus and Phi_n-lattices."""
import pytest

from src.exceptions import DegenerateLatticeError, GlueError, UnsupportedError
from src.services.cyclo import (
    IntPolynomial,
    PhiConstraints,
    TwistElement,
    admissible_orders,
    candidate_polynomials,
    characteristic_polynomial,
    companion_matrix,
    cyclotomic,
    enumerate_phi_lattices,
    glue_bound,
    mod2,
    mod2_factor_check,
    phi8_obstruction,
    phi_genera,
    principal_phi_lattice,
    product,
    ramanujan_sum,
    real_subfield_polynomial,
    resultant,
    shares_factor_mod2,
    twist,
)
from src.services import linalg
from src.services.isometries import isometry_test
from src.services.root_lattices import cartan_a


class TestPolynomials:
    """Cyclotomic polynomials and resultants."""

    def test_cyclotomic(self):
        assert cyclotomic(1).coefficients == (-1, 1)
        assert cyclotomic(3).coefficients == (1, 1, 1)
        assert cyclotomic(8).coefficients == (1, 0, 0, 0, 1)
        assert cyclotomic(12).coefficients == (1, 0, -1, 0, 1)

    def test_cyclotomic_rejects_zero(self):
        with pytest.raises(ValueError):
            cyclotomic(0)

    def test_zero_polynomial_rejected(self):
        with pytest.raises(ValueError):
            IntPolynomial((0, 0))

    def test_product_degree(self):
        p = product([cyclotomic(m) for m in (1, 1, 3, 8)])
        assert p.degree == 8
        assert p(1) == 0

    @pytest.mark.parametrize(
        "n, m, expected",
        [(3, 1, 3), (2, 1, 2), (4, 1, 2), (3, 6, 4), (9, 3, 9), (5, 3, 1), (7, 1, 7)],
    )
    def test_resultants(self, n, m, expected):
        assert abs(resultant(cyclotomic(n), cyclotomic(m))) == expected

    def test_glue_bound(self):
        assert glue_bound(9, cyclotomic(3)) == 9
        assert glue_bound(7, product([cyclotomic(1), cyclotomic(2)])) == 7

    def test_glue_bound_common_factor(self):
        with pytest.raises(GlueError):
            glue_bound(3, product([cyclotomic(1), cyclotomic(3)]))


class TestModTwo:
    """Factorization over F1, F3, F5, F7, F9."""

    @pytest.mark.parametrize(
        "indices, rendered",
        [
            ((1, 1, 3), "F3*F1^2"),
            ((2,), "F1"),
            ((4,), "F1^2"),
            ((8,), "F1^4"),
            ((6, 12), "F3^3"),
            ((10,), "F5"),
            ((14, 7), "F7^2"),
            ((18,), "F9"),
        ],
    )
    def test_decomposition(self, indices, rendered):
        dec = mod2_factor_check(product([cyclotomic(m) for m in indices]))
        assert dec.ok
        assert dec.render() == rendered

    @pytest.mark.parametrize("m", [11, 15, 30])
    def test_refused(self, m):
        dec = mod2_factor_check(cyclotomic(m))
        assert not dec.ok
        assert dec.render().startswith("refused")

    def test_half_of_f7_is_refused(self):
        dec = mod2_factor_check(IntPolynomial((1, 1, 0, 1)))
        assert not dec.ok
        assert dec.exponents[7] == 0

    def test_divisible_by(self):
        dec = mod2_factor_check(product([cyclotomic(m) for m in (1, 1, 3, 9)]))
        assert dec.divisible_by({1: 2, 3: 1, 9: 1})
        assert not dec.divisible_by({1: 3})

    def test_shares_factor(self):
        assert shares_factor_mod2(cyclotomic(5), cyclotomic(10))
        assert shares_factor_mod2(cyclotomic(2), cyclotomic(8))
        assert not shares_factor_mod2(cyclotomic(3), cyclotomic(5))

    def test_mod2_reduction(self):
        assert mod2(cyclotomic(6)).coefficients == (1, 1, 1)
        assert mod2(cyclotomic(4)).degree == 2


class TestPrincipalLattices:
    """Trace forms on Z[zeta_n]."""

    def test_ramanujan_sums(self):
        assert ramanujan_sum(5, 0) == 4
        assert ramanujan_sum(5, 1) == -1
        assert ramanujan_sum(6, 3) == -2
        assert ramanujan_sum(9, 3) == -3

    @pytest.mark.parametrize(
        "n, coefficients",
        [(3, (1, 1)), (5, (-1, 1, 1)), (8, (-2, 0, 1)), (7, (-1, -2, 1, 1))],
    )
    def test_real_subfield_polynomial(self, n, coefficients):
        assert real_subfield_polynomial(n).coefficients == coefficients

    def test_companion_matrix(self):
        phi7 = cyclotomic(7)
        g = companion_matrix(phi7)
        assert characteristic_polynomial(g) == phi7
        power = linalg.identity(6)
        for _ in range(7):
            power = power.dot(g)
        assert (power == linalg.identity(6)).all()

    @pytest.mark.parametrize("n, det", [(3, 3), (5, 5), (7, 7), (8, 4), (9, 3), (12, 1)])
    def test_principal_determinants(self, n, det):
        principal = principal_phi_lattice(n)
        assert abs(principal.lattice.determinant()) == det
        assert principal.is_valid()

    def test_principal_phi3_is_a2(self):
        principal = principal_phi_lattice(3)
        assert principal.lattice.signature() == (2, 0)
        assert isometry_test(principal.lattice, cartan_a(2)) is not None

    def test_principal_phi5_signature(self):
        assert principal_phi_lattice(5).lattice.signature() == (2, 2)

    def test_small_n_rejected(self):
        with pytest.raises(UnsupportedError):
            principal_phi_lattice(2)


class TestTwists:
    """Twists of the principal lattice."""

    def test_phi5_twist_is_a4(self):
        twisted = twist(principal_phi_lattice(5), TwistElement((0, 1)))
        assert twisted.lattice.signature() == (4, 0)
        assert twisted.lattice.determinant() == 5
        assert twisted.is_valid()
        assert isometry_test(twisted.lattice, cartan_a(4)) is not None

    def test_zero_twist_is_degenerate(self):
        with pytest.raises(DegenerateLatticeError):
            twist(principal_phi_lattice(5), TwistElement((0,)))

    def test_too_many_coordinates(self):
        with pytest.raises(ValueError):
            twist(principal_phi_lattice(3), TwistElement((1, 1)))

    def test_twist_element_str(self):
        assert str(TwistElement((2, 0, -1))) == "2 + -1*t^2"
        assert str(TwistElement((0, 0))) == "0"

    def test_enumerate_phi3(self):
        found = enumerate_phi_lattices(3, PhiConstraints(det_divisor=3, signatures=((2, 0),)))
        assert len(found) == 1
        assert found[0].is_valid()
        assert found[0].lattice.signature() == (2, 0)

    def test_phi3_genera(self):
        found = enumerate_phi_lattices(3, PhiConstraints(det_divisor=3))
        assert [g.render() for g in phi_genera(found)] == ["II_(0,2)3^1", "II_(2,0)3^-1"]

    def test_enumeration_needs_determinant(self):
        with pytest.raises(UnsupportedError):
            enumerate_phi_lattices(5, PhiConstraints(det_divisor=None))

    def test_indefinite_phi5_twists(self):
        found = enumerate_phi_lattices(
            5, PhiConstraints(det_divisor=5, signatures=((2, 2),), coefficient_bound=1))
        assert found
        assert all(not p.exact_class for p in found)
        assert all(p.is_valid() for p in found)
        assert {p.lattice.signature() for p in found} == {(2, 2)}
        assert len(phi_genera(found)) == len(found)

    def test_phi5_max_signature(self):
        found = enumerate_phi_lattices(
            5, PhiConstraints(det_divisor=5, max_signature=(4, 0), coefficient_bound=1))
        assert found
        assert all(p.exact_class for p in found)
        assert {p.lattice.signature() for p in found} == {(4, 0)}

    @pytest.mark.parametrize(
        "extra, dets",
        [
            ({"two_rank": (2, 2)}, [12, 12]),
            ({"two_rank": (0, 0)}, [3, 3]),
            ({"max_signature": (2, 0)}, [3, 12]),
        ],
    )
    def test_phi3_constraint_filters(self, extra, dets):
        found = enumerate_phi_lattices(3, PhiConstraints(det_divisor=12, coefficient_bound=2, **extra))
        assert sorted(int(abs(p.lattice.determinant())) for p in found) == dets

    def test_two_rank_window(self):
        a2_2 = cartan_a(2).rescale(2)
        assert PhiConstraints(det_divisor=12, two_rank=(2, 2)).admits(a2_2)
        assert not PhiConstraints(det_divisor=12, two_rank=(0, 1)).admits(a2_2)
        assert PhiConstraints(det_divisor=12, two_rank=(0, 0)).admits(cartan_a(2))


class TestAdmissibleOrders:
    """Order filter over degree-12 characteristic polynomials."""

    def test_candidate_degrees(self):
        candidates = candidate_polynomials()
        assert (1,) * 12 in candidates
        assert all(product([cyclotomic(m) for m in ms]).degree == 12 for ms in candidates[:200])
        assert all(list(ms) == sorted(ms) for ms in candidates)

    def test_candidates_respect_factor_degree(self):
        assert all(m not in (11, 13) for ms in candidate_polynomials() for m in ms)
        assert any(15 in ms for ms in candidate_polynomials())

    @pytest.mark.slow
    def test_phi8_obstruction(self):
        assert phi8_obstruction()

    @pytest.mark.slow
    def test_admissible_orders(self):
        orders = admissible_orders([48, 56, 72, 84, 90, 120])
        assert len(orders) == 28
        assert not {45, 72, 90} & set(orders)
        assert {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 15, 20} <= set(orders)
        assert all(any(b % o == 0 for b in (36, 48, 56, 84, 120)) for o in orders)
