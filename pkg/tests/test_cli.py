import json

import numpy as np
import pytest

from vcnn.cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestBoundsCommand:
    def test_table_has_expected_rows(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--d", "2", "--m", "3..6")
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert len(lines) == 5
        row = lines[1].split()
        assert row[:3] == ["2", "3", "6"]

    def test_planar_and_spatial_rows(self, capsys):
        _, out, _ = run_cli(capsys, "bounds", "--d", "2..3", "--m", "3..4", "--format", "csv")
        rows = {tuple(line.split(",")[:2]): line.split(",") for line in out.strip().splitlines()[1:]}
        assert rows[("2", "4")][2] == "9"
        assert rows[("3", "3")][2] == "8"
        assert rows[("3", "3")][3] == "12.0"

    def test_byte_identical_runs(self, capsys):
        _, out1, _ = run_cli(capsys, "bounds", "--d", "2..4", "--m", "3..9", "--format", "csv")
        _, out2, _ = run_cli(capsys, "bounds", "--d", "2..4", "--m", "3..9", "--format", "csv")
        assert out1 == out2

    def test_json_schema(self, capsys):
        _, out, _ = run_cli(capsys, "bounds", "--d", "2", "--m", "3", "--format", "json")
        doc = json.loads(out)
        assert doc["schema"] == "vcnn-bounds/1"
        assert doc["rows"][0]["lower"] == 6

    def test_unsupported_range_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "bounds", "--d", "1", "--m", "3")
        assert code == EXIT_USAGE
        assert "error" in err


class TestWitnessAndVerify:
    def test_takacs_roundtrip(self, capsys, tmp_path):
        path = tmp_path / "takacs2.json"
        code, _, _ = run_cli(capsys, "witness", "takacs", "--n", "2", "--no-meta", "--out", str(path))
        assert code == EXIT_OK
        doc = json.loads(path.read_text())
        assert doc["schema"] == "vcnn-certificate/1"
        assert doc["kind"] == "takacs"
        assert doc["verified"] is True
        assert len(doc["witnesses"]) == 64
        code, out, _ = run_cli(capsys, "verify", str(path))
        assert code == EXIT_OK
        assert "64 labelings pass" in out

    def test_gunn_witness_counts(self, capsys, tmp_path):
        path = tmp_path / "gunn4.json"
        code, _, _ = run_cli(capsys, "witness", "gunn", "--m", "4", "--no-meta", "--out", str(path))
        assert code == EXIT_OK
        doc = json.loads(path.read_text())
        assert len(doc["witnesses"]) == 512
        assert doc["verified"] is True
        assert all(len(w["labels"]) <= 4 for w in doc["witnesses"].values())
        code, _, _ = run_cli(capsys, "verify", str(path))
        assert code == EXIT_OK

    def test_witness_bytes_reproducible(self, capsys, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        run_cli(capsys, "witness", "takacs", "--n", "2", "--no-meta", "--out", str(p1))
        run_cli(capsys, "witness", "takacs", "--n", "2", "--no-meta", "--out", str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_flipped_label_detected(self, capsys, tmp_path):
        path = tmp_path / "takacs2.json"
        run_cli(capsys, "witness", "takacs", "--n", "2", "--no-meta", "--out", str(path))
        doc = json.loads(path.read_text())
        doc["witnesses"]["0x5"]["labels"] = [-l for l in doc["witnesses"]["0x5"]["labels"]]
        path.write_text(json.dumps(doc))
        code, out, _ = run_cli(capsys, "verify", str(path))
        assert code == EXIT_VERIFICATION
        assert "0x5" in out

    def test_raised_mu_fails_margin_check(self, capsys, tmp_path):
        path = tmp_path / "takacs2.json"
        run_cli(capsys, "witness", "takacs", "--n", "2", "--no-meta", "--out", str(path))
        doc = json.loads(path.read_text())
        doc["mu"] = 0.5
        path.write_text(json.dumps(doc))
        code, out, _ = run_cli(capsys, "verify", str(path))
        assert code == EXIT_VERIFICATION
        assert "margin" in out

    def test_missing_witness_detected(self, capsys, tmp_path):
        path = tmp_path / "takacs2.json"
        run_cli(capsys, "witness", "takacs", "--n", "2", "--no-meta", "--out", str(path))
        doc = json.loads(path.read_text())
        del doc["witnesses"]["0x2a"]
        path.write_text(json.dumps(doc))
        code, out, _ = run_cli(capsys, "verify", str(path))
        assert code == EXIT_VERIFICATION
        assert "0x2a" in out and "missing" in out

    def test_polytope_square_witness(self, capsys, tmp_path):
        path = tmp_path / "square.json"
        code, _, _ = run_cli(
            capsys, "witness", "polytope", "--square", "--seed", "0", "--no-meta", "--out", str(path)
        )
        assert code == EXIT_OK
        doc = json.loads(path.read_text())
        assert doc["schema"] == "vcnn-polytope-witness/1"
        assert len(doc["prototypes"]) == 5
        assert doc["check"]["disagreements"] == 0
        code, out, _ = run_cli(capsys, "verify", str(path))
        assert code == EXIT_OK

    def test_polytope_requires_square_flag(self, capsys):
        code, _, _ = run_cli(capsys, "witness", "polytope")
        assert code == EXIT_USAGE

    def test_unverifiable_witness_refused_unless_forced(self, capsys, tmp_path):
        path = tmp_path / "impossible.json"
        # an absurd margin demand cannot be met by any construction
        code, _, err = run_cli(
            capsys, "witness", "takacs", "--n", "2", "--mu", "10.0",
            "--no-meta", "--out", str(path),
        )
        assert code == EXIT_VERIFICATION
        assert "labelling" in err
        assert not path.exists()
        code, _, _ = run_cli(
            capsys, "witness", "takacs", "--n", "2", "--mu", "10.0",
            "--no-meta", "--force", "--out", str(path),
        )
        assert code == EXIT_VERIFICATION
        doc = json.loads(path.read_text())
        assert doc["verified"] is False
        assert "first_failure" in doc

    def test_env_seed_is_default(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("VCNN_SEED", "42")
        path = tmp_path / "square.json"
        code, _, _ = run_cli(capsys, "witness", "polytope", "--square", "--no-meta", "--out", str(path))
        assert code == EXIT_OK
        assert json.loads(path.read_text())["check"]["seed"] == 42

    def test_unknown_schema_rejected(self, capsys, tmp_path):
        path = tmp_path / "bogus.json"
        path.write_text(json.dumps({"schema": "nonsense/9"}))
        code, _, err = run_cli(capsys, "verify", str(path))
        assert code == EXIT_USAGE
        assert "schema" in err


class TestPlotData:
    def test_out_of_grid_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "plot-data", "--d", "1,2", "--m", "3..10")
        assert code == EXIT_USAGE

    def test_columns_and_ordering(self, capsys):
        code, out, _ = run_cli(capsys, "plot-data", "--d", "2,3", "--m", "3..50")
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        header = lines[0].split(",")
        assert header == ["m", "tight_d2", "loose_d2", "ratio_d2", "tight_d3", "loose_d3", "ratio_d3"]
        data = np.array([[float(tok) for tok in line.split(",")] for line in lines[1:]])
        # loose >= tight, ratio >= 1, curves monotone, planar below spatial
        assert np.all(data[:, 2] >= data[:, 1])
        assert np.all(data[:, 3] >= 1.0)
        assert np.all(data[:, 6] >= 1.0)
        assert np.all(np.diff(data[:, 1]) > 0)
        assert np.all(np.diff(data[:, 4]) > 0)
        assert np.all(data[:, 1] <= data[:, 4])


class TestSearchCommand:
    def test_search_writes_certificate(self, capsys, tmp_path):
        path = tmp_path / "search.json"
        code, out, _ = run_cli(
            capsys, "search", "--d", "2", "--m", "2", "--n", "3",
            "--trials", "16", "--point-sets", "2", "--steps", "80",
            "--seed", "0", "--no-meta", "--out", str(path),
        )
        assert code == EXIT_OK
        assert "certificate found" in out
        code, _, _ = run_cli(capsys, "verify", str(path))
        assert code == EXIT_OK

    def test_search_failure_reports_budget(self, capsys):
        code, out, _ = run_cli(
            capsys, "search", "--d", "2", "--m", "2", "--n", "6",
            "--trials", "4", "--point-sets", "1", "--steps", "30", "--seed", "0",
        )
        assert code == EXIT_VERIFICATION
        assert "proves nothing" in out
