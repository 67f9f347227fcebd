"""Tests for exact vector enumeration."""
import itertools
import random
from fractions import Fraction
from math import isqrt

import pytest

from src.exceptions import UnsupportedError
from src.services import linalg
from src.services.enumeration import (
    AffineSlice,
    close_vectors,
    fixed_pairing_vectors,
    format_root_type,
    lll_reduce,
    lll_reduce_lattice,
    root_type,
    separating_roots,
    short_vectors,
    theta_prefix,
    vectors_by_norm,
)
from src.services.lattice import Lattice, direct_sum
from src.services.root_lattices import cartan_a, cartan_d, cartan_e, hyperbolic_plane


def u_plus_a1_minus() -> Lattice:
    return direct_sum(hyperbolic_plane(), cartan_a(1).rescale(-1))


def random_unit_lattice(rng: random.Random, rank: int) -> Lattice:
    """2 M M^T with M = diagonal times unit upper triangular."""
    m = [[0] * rank for _ in range(rank)]
    for i in range(rank):
        m[i][i] = rng.randint(1, 2)
        for j in range(i + 1, rank):
            m[i][j] = rng.randint(-1, 1)
    mat = linalg.int_matrix(m, rank)
    return Lattice(2 * mat.dot(mat.T))


def naive_short_vectors(lattice: Lattice, norm: int):
    """Exhaustive search in the box |x_i|^2 <= norm * (G^-1)_ii."""
    inv = linalg.inverse(lattice.gram)
    radii = [isqrt(int(Fraction(norm) * inv[i, i])) + 1 for i in range(lattice.rank)]
    found = set()
    for x in itertools.product(*(range(-r, r + 1) for r in radii)):
        if any(x) and lattice.norm(list(x)) == norm:
            lead = next(c for c in x if c)
            if lead > 0:
                found.add(x)
    return found


class TestLLL:
    """Reduction of skewed bases."""

    def test_skewed_a2(self):
        u0 = linalg.int_matrix([[1, 0], [5, 1]], 2)
        skewed = u0.dot(cartan_a(2).gram).dot(u0.T)
        u, reduced = lll_reduce(skewed)
        assert abs(linalg.determinant(u)) == 1
        assert (u.dot(skewed).dot(u.T) == reduced).all()
        assert sorted(reduced[i, i] for i in range(2)) == [2, 2]

    def test_negative_lattice_keeps_sign(self):
        lat = cartan_d(4).rescale(-1)
        reduced = lll_reduce_lattice(lat)
        assert reduced.signature() == (0, 4)
        assert reduced.determinant() == lat.determinant()

    def test_indefinite_rejected(self):
        with pytest.raises(UnsupportedError):
            lll_reduce_lattice(hyperbolic_plane())


class TestShortVectors:
    """Fincke-Pohst over definite lattices."""

    def test_a2_roots(self):
        assert len(short_vectors(cartan_a(2), 2)) == 3

    def test_e8_roots(self):
        assert len(short_vectors(cartan_e(8), 2)) == 120

    def test_negative_definite(self):
        assert len(short_vectors(cartan_d(4).rescale(-1), -2)) == 12
        assert short_vectors(cartan_d(4).rescale(-1), 2) == []

    def test_indefinite_rejected(self):
        with pytest.raises(UnsupportedError):
            short_vectors(hyperbolic_plane(), 2)

    def test_close_vectors_with_center(self):
        found = close_vectors(linalg.frac_matrix([[2]], 1), [Fraction(1, 2)], Fraction(1, 2))
        assert [list(v) for v in found] == [[0], [1]]

    def test_vectors_by_norm(self):
        by_norm = vectors_by_norm(cartan_a(2), 6)
        assert len(by_norm[Fraction(2)]) == 6
        assert len(by_norm[Fraction(6)]) == 6
        assert Fraction(4) not in by_norm

    def test_theta_prefix(self):
        assert theta_prefix(cartan_d(4)) == (12, 12)
        assert theta_prefix(cartan_d(4).rescale(-1)) == (12, 12)

    def test_against_exhaustive_search(self):
        rng = random.Random(31337)
        for _ in range(200):
            lat = random_unit_lattice(rng, rng.randint(1, 3))
            norm = rng.choice([2, 4, 6])
            fast = {tuple(int(c) for c in v) for v in short_vectors(lat, norm)}
            assert fast == naive_short_vectors(lat, norm)


class TestRootType:
    """ADE types of root sublattices."""

    @pytest.mark.parametrize(
        "lattice, expected",
        [
            (cartan_e(8), "E8"),
            (cartan_e(8).rescale(-1), "E8"),
            (cartan_e(8).rescale(2), "0"),
            (direct_sum(cartan_d(4), cartan_a(2), cartan_a(1)), "A1+A2+D4"),
            (direct_sum(cartan_a(1), cartan_a(1), cartan_e(6)), "2A1+E6"),
        ],
    )
    def test_root_type(self, lattice, expected):
        assert root_type(lattice) == expected

    def test_format(self):
        assert format_root_type(["D4", "A1"] * 2 + ["A1"] * 6) == "8A1+2D4"
        assert format_root_type(["A10", "A2"]) == "A2+A10"
        assert format_root_type([]) == "0"


class TestSlices:
    """Vectors on compact affine slices of hyperbolic lattices."""

    def test_roots_orthogonal_to_positive_vector(self):
        lat = u_plus_a1_minus()
        roots = fixed_pairing_vectors(lat, -2, [1, 1, 0], 0)
        assert {tuple(int(c) for c in v) for v in roots} == {(0, 0, 1), (0, 0, -1), (1, -1, 0), (-1, 1, 0)}

    def test_non_compact_slice(self):
        lat = u_plus_a1_minus()
        with pytest.raises(UnsupportedError):
            AffineSlice(lat.gram, linalg.int_matrix([[1], [0], [0]], 1))

    def test_unsolvable_values(self):
        lat = u_plus_a1_minus()
        sl = AffineSlice(lat.gram, linalg.int_matrix([[2], [2], [0]], 1))
        assert sl.vectors([1], -2) == []
        assert len(sl.vectors([0], -2)) == 4

    def test_separating_roots(self):
        lat = u_plus_a1_minus()
        found = separating_roots(lat, [2, 2, 1], [2, 2, -1])
        assert [[int(c) for c in v] for v in found] == [[0, 0, -1]]

    def test_separating_roots_same_chamber(self):
        lat = u_plus_a1_minus()
        assert separating_roots(lat, [2, 2, 1], [3, 3, 1]) == []

    def test_separating_roots_wrong_cone(self):
        lat = u_plus_a1_minus()
        with pytest.raises(ValueError):
            separating_roots(lat, [1, 1, 0], [-1, -1, 0])
