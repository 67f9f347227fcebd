"""Tests for isometries, orthogonal groups and mod-2 images."""
import random

import numpy as np
import pytest

from src.exceptions import UnsupportedError
from src.services import linalg
from src.services.enumeration import short_vectors
from src.services.isometries import (
    GlueContext,
    Isometry,
    certify_symmetric,
    configuration_automorphisms,
    definite_orthogonal_group,
    discriminant_action,
    isometry_test,
    matrix_group_order,
    mod2,
    preserves,
    reflection,
)
from src.services.lattice import Lattice, direct_sum, overlattice_from_glue
from src.services.root_lattices import cartan_a, cartan_d, cartan_e, hyperbolic_plane


def permutation_matrix(perm) -> np.ndarray:
    n = len(perm)
    return linalg.int_matrix([[int(perm[i] == j) for j in range(n)] for i in range(n)], n)


class TestIsometry:
    """Matrices preserving a Gram matrix."""

    def test_rejects_non_isometry(self):
        with pytest.raises(ValueError):
            Isometry(linalg.int_matrix([[1, 1], [0, 1]], 2), cartan_a(2))

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            Isometry(linalg.identity(3), cartan_a(2))

    def test_composition_and_inverse(self):
        a2 = cartan_a(2)
        r1 = reflection(a2, [1, 0])
        r2 = reflection(a2, [0, 1])
        rotation = r1 @ r2
        assert rotation.order() == 3
        assert (rotation @ rotation.inverse()).is_identity

    def test_reflection_needs_root(self):
        with pytest.raises(ValueError):
            reflection(cartan_a(2), [1, -1])

    def test_hyperbolic_reflection(self):
        lat = direct_sum(hyperbolic_plane(), cartan_a(1).rescale(-1))
        s = reflection(lat, [0, 0, 1])
        assert list(s.apply([0, 0, 1])) == [0, 0, -1]
        assert list(s.apply([1, 0, 0])) == [1, 0, 0]

    def test_random_reflections(self):
        rng = random.Random(5)
        lattices = [cartan_a(4), cartan_d(4), cartan_d(5).rescale(-1), cartan_e(6)]
        roots = [short_vectors(lat, 2 if lat.signature()[0] else -2) for lat in lattices]
        for _ in range(200):
            i = rng.randrange(len(lattices))
            lat, r = lattices[i], rng.choice(roots[i])
            s = reflection(lat, r)
            assert preserves(s.matrix, lat.gram)
            assert s.order() == 2
            assert list(s.apply(r)) == list(-r)
            v = linalg.vector([rng.randint(-3, 3) for _ in range(lat.rank)])
            assert lat.product(s.apply(v), r) == -lat.product(v, r)


class TestOrthogonalGroups:
    """Exact orders of O(L) for definite lattices."""

    @pytest.mark.parametrize(
        "lattice, order",
        [
            (cartan_a(1), 2),
            (cartan_a(2), 12),
            (cartan_a(2).rescale(-1), 12),
            (cartan_a(3), 48),
            (direct_sum(cartan_a(1), cartan_a(1)), 8),
            (cartan_d(4), 1152),
        ],
    )
    def test_order(self, lattice, order):
        group = definite_orthogonal_group(lattice)
        assert group.order == order
        assert all(preserves(g, lattice.gram) for g in group.generators)

    def test_elements(self):
        group = definite_orthogonal_group(cartan_a(2))
        elements = group.elements()
        assert len(elements) == 12
        assert all(preserves(g, cartan_a(2).gram) for g in elements)

    def test_permutation_round_trip(self):
        group = definite_orthogonal_group(cartan_a(3))
        for g in group.generators:
            assert linalg.key(group.matrix_of(group.permutation(g))) == linalg.key(g)

    def test_too_large_to_list(self):
        group = definite_orthogonal_group(cartan_d(4))
        with pytest.raises(UnsupportedError):
            group.elements(limit=100)

    def test_indefinite_rejected(self):
        with pytest.raises(UnsupportedError):
            definite_orthogonal_group(hyperbolic_plane())

    def test_configuration_automorphisms(self):
        a2 = cartan_a(2)
        roots = short_vectors(a2, 2)
        found = configuration_automorphisms(a2, roots + [-r for r in roots])
        assert len(found) == 12


class TestIsometryTest:
    """Deciding isometry of definite lattices."""

    def test_skewed_basis(self):
        u0 = linalg.int_matrix([[1, 0], [3, 1]], 2)
        skewed = Lattice(u0.dot(cartan_a(2).gram).dot(u0.T))
        g = isometry_test(skewed, cartan_a(2))
        assert g is not None
        assert linalg.key(g.dot(cartan_a(2).gram).dot(g.T)) == linalg.key(skewed.gram)

    def test_same_determinant_not_isometric(self):
        first = Lattice.from_rows([[2, 0], [0, 6]])
        second = Lattice.from_rows([[4, 2], [2, 4]])
        assert isometry_test(first, second) is None

    def test_rank_mismatch(self):
        assert isometry_test(cartan_a(2), cartan_a(3)) is None

    def test_sign_mismatch(self):
        assert isometry_test(cartan_a(2), cartan_a(2).rescale(-1)) is None


class TestDiscriminantActions:
    """Induced actions on L^/L and extension through glue."""

    def test_minus_identity(self):
        a2 = cartan_a(2)
        minus = discriminant_action(Isometry(-linalg.identity(2), a2))
        assert minus.acts_as_pm1
        assert not minus.is_identity
        assert discriminant_action(reflection(a2, [1, 0])).is_identity

    def test_glue_extensions(self):
        a2 = cartan_a(2)
        over = overlattice_from_glue(a2, a2.rescale(-1), [((1,), (1,))])
        assert over.lattice.is_unimodular()
        ctx = GlueContext(over, definite_orthogonal_group(a2.rescale(-1)))
        for g in (linalg.identity(2), -linalg.identity(2)):
            found = ctx.extensions(g)
            assert len(found) == 6
            for h in found:
                assert preserves(ctx.extend(g, h), over.lattice.gram)
            assert ctx.extension(g) is not None


class TestModTwoImages:
    """Certified orders of images in GL_n(F_2)."""

    def test_mod2(self):
        assert mod2(linalg.int_matrix([[3, -1], [2, 5]], 2)).tolist() == [[1, 1], [0, 1]]

    def test_permutation_matrices(self):
        gens = [permutation_matrix([1, 0, 2]), permutation_matrix([1, 2, 0])]
        assert matrix_group_order(gens) == 6

    def test_certify_symmetric(self):
        gens = [permutation_matrix([1, 0, 2, 3]), permutation_matrix([1, 2, 3, 0])]
        cert = certify_symmetric(gens, 4)
        assert cert.order == 24
        assert cert.certified
        assert cert.natural_orbit == (1, 2, 4, 8)

    def test_wrong_degree(self):
        gens = [permutation_matrix([1, 0, 2, 3]), permutation_matrix([1, 2, 3, 0])]
        cert = certify_symmetric(gens, 5)
        assert not cert.order_matches
        assert not cert.certified

    def test_no_generators(self):
        with pytest.raises(ValueError):
            matrix_group_order([])
