"""Tests for the claim verifier."""
from pathlib import Path

import pytest

from src.agents.verifier import (
    CLAIMS,
    ClaimTrace,
    ClaimVerifier,
    a2_discriminant_orders,
    definite_representative,
    indefinite_representative,
    n_lattice,
    phi3_two_adic_candidates,
    scale_2_rank,
    two_rank_window,
    word_with_factor,
)
from src.exceptions import FixtureError
from src.models.fixtures import load_external_facts
from src.models.reports import BorcherdsReport, ClaimStatus
from src.services.genus import GenusSymbol, genus_symbol
from src.services.root_lattices import hyperbolic_plane

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def facts():
    return load_external_facts(FIXTURES / "external_facts.json")


def cycle_matrix(length: int, size: int = 10):
    """Permutation matrix of a cycle on the first ``length`` coordinates."""
    perm = [(i + 1) % length if i < length else i for i in range(size)]
    return [[int(perm[i] == j) for j in range(size)] for i in range(size)]


class TestClaimTrace:
    """Trace rows and report status."""

    def test_rows(self, facts):
        t = ClaimTrace("demo", facts)
        assert t.check("list", [1, 2], [1, 2])
        assert t.check("symbol", GenusSymbol.parse("II_(2,2)2^2"), "II_(2,2)2^2")
        assert t.check("flag", True, True)
        assert not t.check("missing", None, 3)
        t.external("mo1_no_order9")
        report = t.report()
        assert report.status == ClaimStatus.REFUTED
        assert len(report.trace) == 5
        assert report.trace[2].computed == "yes"
        assert report.mismatches[0].computed == "-"
        assert report.external_facts[0].citation == "[MO1]"

    def test_all_verified(self, facts):
        t = ClaimTrace("demo", facts)
        t.check("one", 1, 1)
        assert t.report().status == ClaimStatus.VERIFIED

    def test_unknown_fact(self, facts):
        with pytest.raises(FixtureError):
            ClaimTrace("demo", facts).external("not-a-fact")


class TestHelpers:
    """Small computations the claims are built from."""

    def test_n_lattice(self):
        assert genus_symbol(n_lattice()).render() == "II_(2,10)2^10"

    def test_scale_2_rank(self):
        assert scale_2_rank(n_lattice()) == 10
        assert scale_2_rank(hyperbolic_plane()) == 0

    def test_two_rank_window(self):
        assert two_rank_window(n_lattice(), 8) == (6, 8)
        u = hyperbolic_plane()
        assert two_rank_window(u.direct_sum(u.rescale(2)), 2) == (0, 2)

    def test_phi3_two_adic_candidates(self):
        assert [s.render() for s in phi3_two_adic_candidates(2, 1)] == ["1^-2", "2^-2"]
        assert [s.render() for s in phi3_two_adic_candidates(4, 1)] == ["1^4", "1^-2 2^-2", "2^4"]

    @pytest.mark.parametrize("n, orders", [(1, [3]), (2, [2, 2, 3]), (3, [3, 9]), (-6, [2, 2, 3, 9])])
    def test_a2_discriminant_orders(self, n, orders):
        assert a2_discriminant_orders(n) == orders

    def test_indefinite_representative(self):
        target = GenusSymbol.parse("II_(2,2)2^2")
        found = indefinite_representative(target, hyperbolic_plane().rescale(2))
        assert found is not None
        assert genus_symbol(found).render() == target.render()

    def test_definite_representative_unknown(self):
        with pytest.raises(KeyError):
            definite_representative("II_(8,0)")

    def test_word_with_factor(self):
        gens = [cycle_matrix(7), cycle_matrix(9)]
        assert word_with_factor(gens, 7, seed=1) is not None
        assert word_with_factor(gens, 9, seed=1) is not None
        assert word_with_factor([cycle_matrix(7)], 5, seed=1, tries=50) is None
        assert word_with_factor([], 7, seed=1) is None


class TestClaimVerifier:
    """Dispatch and the replayed claims."""

    def test_claim_ids(self):
        assert CLAIMS == ("f15", "f9", "f7", "headline")

    def test_unknown_claim(self, facts):
        with pytest.raises(FixtureError):
            ClaimVerifier(facts).verify("f11")

    def test_progress_events(self, facts, monkeypatch):
        verifier = ClaimVerifier(facts)
        events = []
        monkeypatch.setattr(verifier, "verify_f7_analysis",
                            lambda: ClaimTrace("f7", facts).report())
        verifier.verify("f7", lambda kind, data: events.append(kind))
        assert events == ["claim_started", "claim_finished"]

    def test_broken_callback_is_ignored(self, facts, monkeypatch):
        verifier = ClaimVerifier(facts)
        monkeypatch.setattr(verifier, "verify_f7_analysis",
                            lambda: ClaimTrace("f7", facts).report())

        def broken(kind, data):
            raise RuntimeError("boom")

        assert verifier.verify("f7", broken).status == ClaimStatus.VERIFIED

    @pytest.mark.slow
    @pytest.mark.parametrize("claim_id", ["f15", "f9", "f7"])
    def test_claims_verified(self, facts, claim_id):
        report = ClaimVerifier(facts).verify(claim_id)
        assert report.status == ClaimStatus.VERIFIED, report.render_text()
        assert report.external_facts

    @pytest.mark.slow
    def test_headline_with_recorded_runs(self, facts):
        runs = {
            "rho16": BorcherdsReport(fixture="rho16", generators=[cycle_matrix(5)],
                                     mod2_order=120, symmetric_degree=5),
            "f7": BorcherdsReport(fixture="f7", generators=[cycle_matrix(7)],
                                  mod2_order=5040, symmetric_degree=7),
            "rho18": BorcherdsReport(fixture="rho18", generators=[cycle_matrix(7), cycle_matrix(9)],
                                     mod2_order=362880, symmetric_degree=9),
        }
        report = ClaimVerifier(facts).verify_headline(runs=runs)
        assert report.status == ClaimStatus.VERIFIED, report.render_text()

    @pytest.mark.slow
    def test_headline_refutes_wrong_image(self, facts):
        runs = {
            "rho16": BorcherdsReport(fixture="rho16", generators=[cycle_matrix(5)],
                                     mod2_order=60, symmetric_degree=None),
            "f7": BorcherdsReport(fixture="f7", generators=[cycle_matrix(7)],
                                  mod2_order=5040, symmetric_degree=7),
            "rho18": BorcherdsReport(fixture="rho18", generators=[cycle_matrix(7), cycle_matrix(9)],
                                     mod2_order=362880, symmetric_degree=9),
        }
        report = ClaimVerifier(facts).verify_headline(runs=runs)
        assert report.status == ClaimStatus.REFUTED
        assert {row.step for row in report.mismatches} == {"mod-2 image order (rho16)", "image is S_5 (rho16)"}
