"""Tests for the command-line interface."""
import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from src.cli.main import EXIT_INPUT, EXIT_REFUTED, app
from src.config import settings
from src.models.reports import BorcherdsReport, ChamberRecord

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

runner = CliRunner()


@pytest.fixture(autouse=True)
def restore_settings():
    """Commands override the global settings; put them back after each test."""
    saved = {key: getattr(settings, key) for key in type(settings).model_fields}
    yield
    for key, value in saved.items():
        setattr(settings, key, value)


def json_output(result) -> object:
    text = result.output
    start = min(i for i in (text.find("{"), text.find("[")) if i >= 0)
    return json.loads(text[start:])


def write_lattice(tmp_path: Path, data) -> Path:
    path = tmp_path / "lattice.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


class TestGenusCommand:
    """genus LATTICE_FILE."""

    def test_a2(self):
        result = runner.invoke(app, ["genus", str(FIXTURES / "a2.json"), "--format", "text"])
        assert result.exit_code == 0
        assert "II_(2,0)3^-1" in result.output

    def test_json(self):
        result = runner.invoke(app, ["genus", str(FIXTURES / "n.json"), "--format", "json"])
        assert result.exit_code == 0
        data = json_output(result)
        assert data["genus"] == "II_(2,10)2^10"
        assert data["signature"] == [2, 10]

    def test_rational_entries(self, tmp_path):
        path = write_lattice(tmp_path, {"gram": [["1/2", 0], [0, 2]]})
        result = runner.invoke(app, ["genus", str(path)])
        assert result.exit_code == EXIT_INPUT

    def test_malformed_file(self, tmp_path):
        path = write_lattice(tmp_path, {"gram": [[2, 1]]})
        result = runner.invoke(app, ["genus", str(path)])
        assert result.exit_code == EXIT_INPUT

    def test_odd_lattice(self, tmp_path):
        path = write_lattice(tmp_path, {"gram": [[1]]})
        result = runner.invoke(app, ["genus", str(path)])
        assert result.exit_code == EXIT_INPUT

    def test_missing_file(self, tmp_path):
        result = runner.invoke(app, ["genus", str(tmp_path / "nope.json")])
        assert result.exit_code == EXIT_INPUT


class TestPhiCommand:
    """phi --n N ..."""

    def test_n_too_small(self):
        result = runner.invoke(app, ["phi", "--n", "2"])
        assert result.exit_code == 2

    def test_wrong_rank(self):
        result = runner.invoke(app, ["phi", "--n", "5", "--rank", "2", "--det", "5"])
        assert result.exit_code == 2

    def test_bad_signature(self):
        result = runner.invoke(app, ["phi", "--n", "3", "--sig", "two"])
        assert result.exit_code == 2

    def test_phi3(self):
        result = runner.invoke(app, ["phi", "--n", "3", "--sig", "2,0", "--det", "3", "--format", "json"])
        assert result.exit_code == 0
        data = json_output(result)
        assert data["n"] == 3
        assert [row["genus"] for row in data["classes"]] == ["II_(2,0)3^-1"]
        assert data["classes"][0]["exact_class"] is True

    def test_phi3_default_determinant(self):
        result = runner.invoke(app, ["phi", "--n", "3", "--bound", "2", "--format", "json"])
        assert result.exit_code == 0
        dets = sorted(row["determinant"] for row in json_output(result)["classes"])
        assert dets == [3, 3, 12, 12]

    def test_table(self):
        result = runner.invoke(app, ["phi", "--n", "3", "--det", "3", "--format", "text"])
        assert result.exit_code == 0
        assert "II_(0,2)3^1" in result.output


class TestOtherCommands:
    """verify, borcherds, build-fixture and orders."""

    def test_verify_unknown_claim(self):
        result = runner.invoke(app, ["verify", "f11"])
        assert result.exit_code == 2

    def test_borcherds_missing_spec(self, tmp_path):
        result = runner.invoke(app, ["borcherds", str(tmp_path / "spec.json")])
        assert result.exit_code == EXIT_INPUT

    def test_borcherds_bad_budget(self):
        result = runner.invoke(app, ["borcherds", "f7", "--budget", "0"])
        assert result.exit_code == EXIT_INPUT

    @pytest.fixture
    def fake_run(self, tmp_path, monkeypatch):
        """A borcherds invocation whose BFS yields one chamber with |G| = 2."""
        import src.agents.borcherds_engine as engine
        import src.services.chambers as chambers
        import src.services.fixture_builder as builder

        report = BorcherdsReport(
            fixture="toy",
            chambers=[ChamberRecord(index=0, tau=[[1]], stabilizer_order=2)],
        )
        monkeypatch.setattr(builder, "load_or_build", lambda spec, rebuild=False: spec)
        monkeypatch.setattr(chambers, "load_setup", lambda fixture: fixture)
        monkeypatch.setattr(engine, "main_borcherds", lambda setup, budget=None, progress_callback=None: report)
        settings.output_dir = str(tmp_path / "reports")

        def invoke(expected):
            spec = {"name": "toy", "q_type": "A6", "transcendental_genus": "II_(2,4)2^4 7^-1",
                    "expected": {"root_type": "0", "OQ_order": 1, **expected}}
            path = tmp_path / "toy.json"
            path.write_text(json.dumps(spec), encoding="utf-8")
            return runner.invoke(app, ["borcherds", str(path)])

        return invoke

    def test_borcherds_expected_counts(self, fake_run):
        result = fake_run({"R_count": 1, "type_counts": {"|G|=2,outer=0": 1}})
        assert result.exit_code == 0

    def test_borcherds_type_count_mismatch(self, fake_run):
        result = fake_run({"R_count": 1, "type_counts": {"|G|=1,outer=0": 1}})
        assert result.exit_code == EXIT_REFUTED

    def test_borcherds_chamber_count_mismatch(self, fake_run):
        assert fake_run({"R_count": 2}).exit_code == EXIT_REFUTED

    def test_build_fixture_missing_spec(self, tmp_path):
        result = runner.invoke(app, ["build-fixture", str(tmp_path / "spec.json")])
        assert result.exit_code == EXIT_INPUT

    @pytest.mark.slow
    def test_orders(self):
        result = runner.invoke(app, ["orders", "--format", "json"])
        assert result.exit_code == 0
        data = json_output(result)
        assert len(data["admissible"]) == 28
        assert data["realized"] == [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 15, 20]
        assert set(data["open"]) == set(data["admissible"]) - set(data["realized"])

    @pytest.mark.slow
    def test_verify_f15(self):
        result = runner.invoke(app, ["verify", "f15", "--format", "text"])
        assert result.exit_code == 0
        assert "VERIFIED" in result.output
