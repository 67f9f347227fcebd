"""Tests for the lattice core."""
import random
from fractions import Fraction

import numpy as np
import pytest

from src.exceptions import DegenerateLatticeError, GlueError, NotEvenError
from src.services import linalg
from src.services.lattice import (
    Lattice,
    Sublattice,
    anti_isometry,
    direct_sum,
    overlattice_from_glue,
    overlattice_from_vectors,
    primitive_extension_report,
)
from src.services.root_lattices import cartan_a, cartan_d, cartan_e, hyperbolic_plane, l10


def random_definite_even(rng: random.Random, rank: int) -> Lattice:
    """2 M M^T for a random non-singular integer M."""
    while True:
        m = linalg.int_matrix([[rng.randint(-2, 2) for _ in range(rank)] for _ in range(rank)], rank)
        if linalg.determinant(m) != 0:
            return Lattice(2 * m.dot(m.T))


class TestInvariants:
    """Determinant, signature and parity of standard lattices."""

    def test_a2(self):
        a2 = cartan_a(2)
        assert a2.determinant() == 3
        assert a2.signature() == (2, 0)
        assert a2.is_even()

    def test_e8_is_even_unimodular(self):
        e8 = cartan_e(8)
        assert e8.determinant() == 1
        assert e8.is_unimodular()
        assert e8.signature() == (8, 0)

    def test_hyperbolic_lattices(self):
        assert hyperbolic_plane().signature() == (1, 1)
        assert l10().signature() == (1, 9)
        assert l10().is_unimodular()

    def test_rational_entries(self):
        lat = Lattice.from_rows([["1/2", 0], [0, 2]])
        assert lat.determinant() == 1
        assert not lat.is_integral()

    def test_singular_gram_rejected(self):
        with pytest.raises(DegenerateLatticeError):
            Lattice.from_rows([[2, 2], [2, 2]])

    def test_asymmetric_gram_rejected(self):
        with pytest.raises(DegenerateLatticeError):
            Lattice.from_rows([[2, 1], [0, 2]])


class TestConstructions:
    """Rescaling, sums and duals."""

    def test_rescale(self):
        e8 = cartan_e(8).rescale(-2)
        assert e8.determinant() == 2 ** 8
        assert e8.signature() == (0, 8)

    def test_rescale_by_zero(self):
        with pytest.raises(DegenerateLatticeError):
            cartan_a(2).rescale(0)

    def test_direct_sum(self):
        u = hyperbolic_plane()
        n = direct_sum(u, u.rescale(2), cartan_e(8).rescale(-2))
        assert n.rank == 12
        assert n.signature() == (2, 10)
        assert abs(n.determinant()) == 2 ** 10

    def test_zero_lattice_is_neutral(self):
        a2 = cartan_a(2)
        assert Lattice.zero().direct_sum(a2) == a2

    def test_dual_of_a2(self):
        dual = cartan_a(2).dual()
        assert dual.determinant() == Fraction(1, 3)
        assert dual.gram[0, 0] == Fraction(2, 3)


class TestDiscriminantForm:
    """Finite quadratic forms on L^dual / L."""

    def test_a2(self):
        form = cartan_a(2).discriminant_form()
        assert form.orders == (3,)
        assert form.q_values == (Fraction(2, 3),)

    def test_d4(self):
        form = cartan_d(4).discriminant_form()
        assert form.orders == (2, 2)
        assert all(form.q(e) == 1 for e in form.elements() if any(e))

    def test_u2(self):
        form = hyperbolic_plane().rescale(2).discriminant_form()
        assert form.order == 4
        assert sorted(form.q(e) for e in form.elements()) == [0, 0, 0, 1]

    def test_odd_lattice_rejected(self):
        with pytest.raises(NotEvenError):
            Lattice.from_rows([[1]]).discriminant_form()

    def test_anti_isometry(self):
        first = hyperbolic_plane().rescale(2).discriminant_form()
        second = hyperbolic_plane().rescale(-2).discriminant_form()
        images = anti_isometry(first, second)
        assert images is not None
        assert len(images) == 2


class TestSublattices:
    """Complements and primitive closures."""

    def test_orthogonal_complement_in_u(self):
        u = hyperbolic_plane().direct_sum(hyperbolic_plane())
        s = u.sublattice([[1, 1, 0, 0]])
        perp = s.orthogonal_complement()
        assert perp.rank == 3
        assert all(u.product(v, [1, 1, 0, 0]) == 0 for v in perp.basis)

    def test_primitive_closure(self):
        e8 = cartan_e(8)
        s = e8.sublattice([[2, 0, 0, 0, 0, 0, 0, 0]])
        assert not s.is_primitive()
        assert s.index_in_closure() == 2
        assert s.primitive_closure() == e8.sublattice([[1, 0, 0, 0, 0, 0, 0, 0]])

    def test_dependent_basis_rejected(self):
        with pytest.raises(DegenerateLatticeError):
            cartan_a(2).sublattice([[1, 0], [2, 0]])


class TestGlue:
    """Overlattices from isotropic glue."""

    def test_a1_plus_a1_minus_is_u(self):
        a1 = Lattice.from_rows([[2]])
        over = overlattice_from_glue(a1, a1.rescale(-1), [((1,), (1,))])
        assert over.index == 2
        assert over.lattice.is_unimodular()
        assert over.lattice.is_even()
        assert over.lattice.signature() == (1, 1)
        report = primitive_extension_report(over)
        assert report.identity_holds
        assert report.divisibility_holds

    def test_non_isotropic_glue(self):
        a1 = Lattice.from_rows([[2]])
        with pytest.raises(GlueError):
            overlattice_from_glue(a1, a1, [((1,), (1,))])

    def test_e8_from_a8(self):
        a8 = cartan_a(8)
        form = a8.discriminant_form()
        glue = next(e for e in form.elements() if form.q(e) == 0 and e[0] % 3 == 0 and any(e))
        over = overlattice_from_vectors(a8, Lattice.zero(), [list(form.vector_of(glue))])
        assert over.index == 3
        assert over.lattice.is_unimodular()


class TestProperties:
    """Randomized identities, seeded."""

    def test_determinant_index_identity(self):
        rng = random.Random(20240601)
        for _ in range(200):
            rank = rng.randint(2, 6)
            c = random_definite_even(rng, rank)
            k = rng.randint(1, rank - 1)
            a = Sublattice(c, linalg.identity(rank)[:k])
            b = a.orthogonal_complement()
            stacked = np.concatenate([a.basis, b.basis], axis=0)
            index = abs(linalg.determinant(stacked))
            assert a.lattice.determinant() * b.lattice.determinant() == index ** 2 * c.determinant()
            ratio = index * c.determinant() / a.lattice.determinant()
            assert Fraction(ratio).denominator == 1

    def test_dual_and_rescale(self):
        rng = random.Random(7)
        for _ in range(200):
            rank = rng.randint(1, 4)
            lat = random_definite_even(rng, rank)
            r = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 2, 3]))
            assert lat.rescale(r).determinant() == r ** rank * lat.determinant()
            assert lat.dual().dual() == lat
            assert lat.dual().determinant() * lat.determinant() == 1
            assert lat.rescale(r).rescale(1 / r) == lat
            assert lat.rescale(r).dual() == lat.dual().rescale(1 / r)
