"""Tests for the pydantic models: lattice files, fixtures and reports."""
import json
from fractions import Fraction
from pathlib import Path

import pytest
from pydantic import ValidationError

from src.exceptions import FixtureError
from src.models.fixtures import (
    ExternalFacts,
    FixtureSpec,
    QType,
    load_external_facts,
    load_fixture_spec,
)
from src.models.lattice_file import LatticeFile, parse_rational, render_rational
from src.models.reports import (
    BorcherdsReport,
    ChamberRecord,
    ClaimStatus,
    TraceRow,
    VerificationReport,
    WallOrbit,
)
from src.services.root_lattices import cartan_a


@pytest.fixture
def fixture_dir():
    """The checked-in fixtures directory."""
    return Path(__file__).resolve().parent.parent / "fixtures"


class TestRationals:
    """Gram entries as ints or "p/q" strings."""

    @pytest.mark.parametrize(
        "value, expected",
        [(3, Fraction(3)), ("-2", Fraction(-2)), ("1/2", Fraction(1, 2)), (" 4/6 ", Fraction(2, 3))],
    )
    def test_parse(self, value, expected):
        assert parse_rational(value) == expected

    @pytest.mark.parametrize("value", [0.5, True, "x", "1/0", None])
    def test_parse_rejects(self, value):
        with pytest.raises(ValueError):
            parse_rational(value)

    def test_render(self):
        assert render_rational(Fraction(4)) == 4
        assert render_rational(Fraction(-1, 3)) == "-1/3"


class TestLatticeFile:
    """Reading and writing lattice files."""

    def test_a2_fixture(self, fixture_dir):
        lattice = LatticeFile.load(fixture_dir / "a2.json").to_lattice()
        assert lattice.determinant() == 3

    def test_n_fixture(self, fixture_dir):
        lattice = LatticeFile.load(fixture_dir / "n.json").to_lattice()
        assert lattice.rank == 12
        assert lattice.signature() == (2, 10)

    def test_dump_rationals(self):
        model = LatticeFile(gram=[["1/2", 0], [0, 2]], name="half")
        data = json.loads(model.model_dump_json())
        assert data["gram"] == [["1/2", 0], [0, 2]]

    def test_from_lattice(self):
        model = LatticeFile.from_lattice(cartan_a(2))
        assert model.name == "A2"
        assert model.to_lattice() == cartan_a(2)

    @pytest.mark.parametrize("gram", [[], [[1, 2]], [[0.5]], "A2"])
    def test_malformed_gram(self, gram):
        with pytest.raises(ValidationError):
            LatticeFile(gram=gram)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FixtureError):
            LatticeFile.load(tmp_path / "missing.json")

    def test_not_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{gram: nope", encoding="utf-8")
        with pytest.raises(FixtureError):
            LatticeFile.load(path)


class TestFixtureModels:
    """Fixture specs and external facts."""

    @pytest.mark.parametrize("name, q_type", [("f7", QType.A6), ("rho16", QType.E6), ("rho18", QType.A8)])
    def test_specs(self, fixture_dir, name, q_type):
        spec = load_fixture_spec(fixture_dir / "specs" / f"{name}.json")
        assert spec.name == name
        assert spec.q_type == q_type

    def test_spec_aliases(self):
        spec = FixtureSpec.model_validate(
            {
                "name": "f7",
                "q_type": "A6",
                "transcendental_genus": "II_(2,4)2^4 7^-1",
                "expected": {"root_type": "8A1+2D4", "OQ_order": 10080, "R_count": 2},
            }
        )
        assert spec.expected.oq_order == 10080
        assert spec.expected.r_count == 2

    def test_unknown_q_type(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"name": "x", "q_type": "D4", "transcendental_genus": "", "expected": {}}))
        with pytest.raises(FixtureError):
            load_fixture_spec(path)

    def test_external_facts(self, fixture_dir):
        facts = load_external_facts(fixture_dir / "external_facts.json")
        assert facts.max_factor_degree == 8
        assert 90 in facts.inherited_bound
        assert facts.fact("mo1_no_order9").citation == "[MO1]"

    def test_unknown_fact(self):
        with pytest.raises(FixtureError):
            ExternalFacts(inherited_bound=[1]).fact("nope")


class TestReports:
    """Report rendering."""

    def test_verification_report(self):
        report = VerificationReport(
            claim_id="f7",
            status=ClaimStatus.REFUTED,
            trace=[
                TraceRow(step="index", computed="7", expected="7", status=ClaimStatus.VERIFIED),
                TraceRow(step="R", computed="3", expected="2", status=ClaimStatus.REFUTED),
                TraceRow(step="fact", computed="assumed", expected="assumed",
                         status=ClaimStatus.EXTERNAL_FACT, citation="[MO1]"),
            ],
        )
        assert [r.step for r in report.mismatches] == ["R"]
        assert len(report.external_facts) == 1
        text = report.render_text()
        assert text.startswith("claim f7: refuted")
        assert "(expected 2)" in text
        assert "[MO1]" in text

    def test_borcherds_report(self):
        orbit = WallOrbit(size=6, outer=True, representative=[1, 0])
        inner = WallOrbit(size=2, outer=False, representative=[0, 1])
        chambers = [
            ChamberRecord(index=0, tau=[[1]], stabilizer_order=6, orbits=[orbit, inner]),
            ChamberRecord(index=1, tau=[[1]], stabilizer_order=2, orbits=[inner]),
        ]
        report = BorcherdsReport(fixture="rho18", chambers=chambers, mod2_order=362880, complete=False)
        assert report.r_count == 2
        assert chambers[0].outer_walls == 6
        assert chambers[0].inner_walls == 2
        assert report.type_counts() == {"|G|=2,outer=0": 1, "|G|=6,outer=6": 1}
        text = report.render_text()
        assert "(partial)" in text
        assert "6x1" in text
