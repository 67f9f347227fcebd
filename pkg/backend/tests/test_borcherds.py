"""Tests for the fixture builder, setup validation and the chamber BFS.

The end-to-end runs are marked slow: they build the three Enriques
fixtures (cached under fixtures/built/) and run the BFS on each.
"""
from types import SimpleNamespace

import pytest

from src.agents import borcherds_engine
from src.agents.borcherds_engine import BorcherdsEngine, main_borcherds
from src.exceptions import ChamberBudgetExceeded, SetupValidationError
from src.models.fixtures import FixtureExpected, QType, load_fixture_spec
from src.services import linalg
from src.services.chambers import (
    adjacent_chamber,
    assemble_setup,
    initial_chamber,
    load_setup,
    pairing_key,
    wall_orbits,
)
from src.services.enumeration import root_type, short_vectors
from src.services.fixture_builder import (
    SETUP_NAMES,
    hyperbolic_partner,
    is_weyl_vector,
    load_or_build,
    q_lattice,
    quotient_by_isotropic,
    seed_complement,
    spec_path,
)
from src.services.genus import genus_symbol
from src.services.isometries import definite_orthogonal_group
from src.services.root_lattices import cartan_a, hyperbolic_plane, l10


class TestWallOrbits:
    """Orbits of finite vector sets."""

    def test_roots_of_a2(self):
        a2 = cartan_a(2)
        roots = short_vectors(a2, 2)
        vectors = roots + [-r for r in roots]
        group = definite_orthogonal_group(a2)
        assert [len(o) for o in wall_orbits(vectors, group.generators)] == [6]

    def test_trivial_group(self):
        vectors = [linalg.vector([1, 0]), linalg.vector([0, 1])]
        assert wall_orbits(vectors, []) == [[0], [1]]


class TestBuilderPieces:
    """Lattices and helpers used by the fixture builder."""

    def test_seed_complement(self):
        p0 = seed_complement()
        assert p0.rank == 16
        assert p0.is_negative_definite()
        assert root_type(p0) == "D8"

    @pytest.mark.parametrize(
        "q_type, symbol",
        [
            (QType.A6, "II_(0,6)2^6 7^1"),
            (QType.E6, "II_(0,6)2^-6 3^1"),
            (QType.A8, "II_(0,8)2^8 9^-1"),
        ],
    )
    def test_q_lattices(self, q_type, symbol):
        assert genus_symbol(q_lattice(q_type)).render() == symbol

    def test_hyperbolic_partner(self):
        u2 = hyperbolic_plane().direct_sum(hyperbolic_plane())
        e = linalg.vector([1, 0, 0, 0])
        f = hyperbolic_partner(u2, e)
        assert u2.norm(f) == 0
        assert u2.product(e, f) == 1

    def test_quotient_by_isotropic(self):
        lat = l10()
        w = linalg.vector([1] + [0] * 9)
        quotient = quotient_by_isotropic(lat, w)
        assert quotient.rank == 8
        assert quotient.is_unimodular()
        assert root_type(quotient) == "E8"
        assert not is_weyl_vector(lat, w)

    def test_non_isotropic_is_not_weyl(self):
        assert not is_weyl_vector(l10(), linalg.vector([1, 1] + [0] * 8))


class TestSetupValidation:
    """Invariants checked by assemble_setup."""

    def test_wrong_l26(self):
        expected = FixtureExpected(root_type="0", OQ_order=1)
        lat = l10()
        with pytest.raises(SetupValidationError) as info:
            assemble_setup("bad", lat, linalg.identity(10), linalg.identity(10), [1] * 10, [0] * 10, expected)
        assert info.value.clause == "L26"


class TestChamberMatching:
    """Representative matching in the BFS."""

    @pytest.fixture
    def lift_calls(self, monkeypatch):
        calls = []

        def fake_lifts(setup, chamber, rep):
            calls.append(rep.k)
            return ["lift-" + rep.k]

        monkeypatch.setattr(borcherds_engine, "pairing_key", lambda setup, c: c.k)
        monkeypatch.setattr(borcherds_engine, "semisymplectic_lifts", fake_lifts)
        return calls

    def test_skips_mismatched_keys(self, lift_calls):
        reps = [SimpleNamespace(k="a"), SimpleNamespace(k="b")]
        lift = BorcherdsEngine()._match(None, SimpleNamespace(k="b"), reps)
        assert lift == "lift-b"
        assert lift_calls == ["b"]

    def test_no_matching_key(self, lift_calls):
        reps = [SimpleNamespace(k="a")]
        assert BorcherdsEngine()._match(None, SimpleNamespace(k="c"), reps) is None
        assert lift_calls == []


@pytest.fixture(scope="module")
def setups():
    """Built and validated setups, keyed by name."""
    out = {}
    for name in SETUP_NAMES:
        spec = load_fixture_spec(spec_path(name))
        out[name] = load_setup(load_or_build(spec))
    return out


@pytest.fixture(scope="module")
def runs(setups):
    return {name: main_borcherds(setup) for name, setup in setups.items()}


@pytest.mark.slow
class TestEnriquesSetups:
    """End-to-end runs on the three fixtures."""

    @pytest.mark.parametrize("name", SETUP_NAMES)
    def test_setup_invariants(self, setups, name):
        setup = setups[name]
        assert setup.s_y.signature() == (1, 9)
        assert setup.s_y.is_unimodular()
        assert setup.q.is_negative_definite()
        assert root_type(setup.p.lattice) == setup.expected.root_type
        assert setup.o_q.order == setup.expected.oq_order
        assert len(setup.walls) == setup.expected.wall_count

    @pytest.mark.parametrize("name", SETUP_NAMES)
    def test_walls_are_roots(self, setups, name):
        setup = setups[name]
        for r in setup.walls:
            assert setup.s_y.norm(r) == -2
            assert setup.s_y.product(setup.alpha, r) > 0

    @pytest.mark.parametrize("name", SETUP_NAMES)
    def test_chamber_count(self, runs, setups, name):
        report = runs[name]
        assert report.complete
        assert report.r_count == setups[name].expected.r_count

    @pytest.mark.parametrize("name", SETUP_NAMES)
    def test_mod2_image(self, runs, setups, name):
        report = runs[name]
        expected = setups[name].expected
        assert report.mod2_order == expected.mod2_order
        assert report.symmetric_degree == expected.symmetric_degree
        assert report.extra["generators_preserve_nef"]

    def test_f7_initial_chamber(self, runs):
        first = runs["f7"].chambers[0]
        assert first.stabilizer_order == 4
        assert first.outer_walls == 12

    def test_rho18_wall_orbits(self, runs):
        first = runs["rho18"].chambers[0]
        assert first.stabilizer_order == 6
        assert first.outer_walls == 12
        assert sorted((o.size for o in first.orbits), reverse=True) == [6, 3, 3, 3, 3, 2]

    def test_generators_are_isometries(self, runs, setups):
        setup = setups["rho16"]
        for g in runs["rho16"].generators:
            m = linalg.int_matrix(g, setup.s_y.rank)
            assert (m.dot(setup.s_y.gram).dot(m.T) == setup.s_y.gram).all()

    def test_budget_exhausted(self, setups):
        with pytest.raises(ChamberBudgetExceeded) as info:
            BorcherdsEngine(budget=2).run(setups["rho16"])
        partial = info.value.partial
        assert partial is not None
        assert not partial.complete
        assert partial.mod2_order is None

    def test_initial_chamber_is_identity(self, setups):
        chamber = initial_chamber(setups["f7"])
        assert linalg.key(chamber.tau) == linalg.key(linalg.identity(10))

    def test_rho16_type_counts(self, runs, setups):
        assert runs["rho16"].type_counts() == setups["rho16"].expected.type_counts

    def test_pairing_key_of_neighbor(self, setups):
        setup = setups["f7"]
        start = initial_chamber(setup)
        neighbor = adjacent_chamber(setup, start, start.walls[0])
        assert pairing_key(setup, neighbor) == pairing_key(setup, start)
