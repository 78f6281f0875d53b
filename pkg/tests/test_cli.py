import json
import math
from pathlib import Path

import pytest

from pcfdr.cli import read_matrix, run, write_matrix

REFERENCE = Path(__file__).resolve().parent.parent / "scenarios" / "reference.json"


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestReadWriteMatrix:
    def test_plain_matrix(self, tmp_path):
        path = write(tmp_path, "m.csv", "0.1,0.2\n0.3,0.4\n")
        ids, rows = read_matrix(path)
        assert ids is None
        assert rows == [[0.1, 0.2], [0.3, 0.4]]

    def test_id_column_detected(self, tmp_path):
        path = write(tmp_path, "m.csv", "geneA,0.1\ngeneB,0.2\n")
        ids, rows = read_matrix(path)
        assert ids == ["geneA", "geneB"]
        assert rows == [[0.1], [0.2]]

    def test_roundtrip_17_digits(self, tmp_path):
        values = [[1 / 3, math.pi / 4], [1e-17, 0.9999999999999999]]
        first = tmp_path / "a.csv"
        write_matrix(str(first), ["r1", "r2"], values)
        ids, rows = read_matrix(str(first))
        assert rows == values  # .17g is lossless for doubles
        second = tmp_path / "b.csv"
        write_matrix(str(second), ids, rows)
        assert first.read_text() == second.read_text()

    def test_diagnostics_carry_line_and_column(self, tmp_path):
        path = write(tmp_path, "m.csv", "0.1,0.2\n0.3,oops\n")
        from pcfdr.cli import CliError
        with pytest.raises(CliError, match=r"m\.csv:2:2"):
            read_matrix(path)


class TestCombine:
    def test_fisher_rows(self, tmp_path, capsys):
        path = write(tmp_path, "m.csv", "0.5,0.5\n0.01,0.02\n")
        assert run(["combine", path, "--method", "fisher"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert float(lines[0]) == pytest.approx(0.5965735902799727)

    def test_pc_u(self, tmp_path, capsys):
        path = write(tmp_path, "m.csv", "0.01,0.02,0.5\n")
        assert run(["combine", path, "--method", "bonferroni", "--u", "2"]) == 0
        out = capsys.readouterr().out.strip()
        assert float(out) == pytest.approx(0.04)

    def test_lambda_rejected_for_plain_method(self, tmp_path):
        path = write(tmp_path, "m.csv", "0.5\n")
        assert run(["combine", path, "--method", "simes", "--lambda", "0.5"]) == 2


class TestPcTest:
    def test_all_ones_empty_report(self, tmp_path, capsys):
        p = write(tmp_path, "p.csv", "1.0\n1.0\n1.0\n1.0\n")
        g = write(tmp_path, "g.txt", "a\na\nb\nb\n")
        assert run(["pc-test", p, "--alpha", "0.05", "--method", "simes",
                    "--groups", g]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["rejected_groups"] == []
        assert report["schema_version"] == 1

    def test_rejects_small_group(self, tmp_path, capsys):
        p = write(tmp_path, "p.csv", "0.001\n0.002\n0.9\n0.8\n")
        g = write(tmp_path, "g.txt", "a\na\nb\nb\n")
        assert run(["pc-test", p, "--alpha", "0.05", "--method", "simes",
                    "--groups", g, "--u", "2"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["rejected_groups"] == ["a"]
        assert report["u"] == [2, 2]

    def test_label_count_mismatch(self, tmp_path):
        p = write(tmp_path, "p.csv", "0.5\n0.5\n")
        g = write(tmp_path, "g.txt", "a\n")
        assert run(["pc-test", p, "--alpha", "0.05", "--method", "simes",
                    "--groups", g]) == 2


class TestReplicate:
    def test_one_by_one_matrix(self, tmp_path, capsys):
        path = write(tmp_path, "m.csv", "0.001\n")
        assert run(["replicate", path, "--q", "0.05", "--method", "simes"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["selected"] == ["0"]
        assert report["khat"] == {"0": 1}

    def test_ids_flow_into_report(self, tmp_path, capsys):
        path = write(tmp_path, "m.csv", "hit,0.0001,0.0002\nmiss,0.8,0.9\n")
        assert run(["replicate", path, "--q", "0.1", "--method", "simes"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["selected"] == ["hit"]
        assert report["khat"]["hit"] >= 1

    def test_unknown_rule(self, tmp_path):
        path = write(tmp_path, "m.csv", "0.5\n")
        assert run(["replicate", path, "--q", "0.05", "--method", "simes",
                    "--rule", "lasso"]) == 2


class TestSimulateVerify:
    def scenario_file(self, tmp_path, checks):
        return write(tmp_path, "scenario.json", json.dumps({"checks": checks}))

    def test_byte_identical_reports(self, tmp_path):
        path = self.scenario_file(tmp_path, [{
            "check": "fdr_pc",
            "scenario": {"m": 10, "n": 3, "true_k": [0] * 10, "reps": 50, "seed": 7},
            "method": "simes", "u": 1, "alpha": 0.05,
        }])
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        assert run(["simulate", "--scenario", path, "--out", str(out1)]) == 0
        assert run(["simulate", "--scenario", path, "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_reps_and_seed_overrides(self, tmp_path):
        path = self.scenario_file(tmp_path, [{
            "check": "fdr_pc",
            "scenario": {"m": 5, "n": 3, "true_k": [0] * 5, "reps": 5, "seed": 1},
            "method": "simes", "u": 1,
        }])
        out = tmp_path / "r.json"
        assert run(["simulate", "--scenario", path, "--reps", "20",
                    "--seed", "99", "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["records"][0]["scenario"]["reps"] == 20
        assert report["records"][0]["scenario"]["seed"] == 99

    def test_verify_bound_violation_exits_3(self, tmp_path, capsys):
        # The adaptive step-up targets FDR close to alpha, well above the
        # alpha*|M0|/m bound that verify scores fdr_pc checks against, so
        # this configuration fails the bound by a wide, stable margin.
        path = self.scenario_file(tmp_path, [{
            "check": "fdr_pc",
            "scenario": {"m": 40, "n": 3, "true_k": [3] * 30 + [0] * 10,
                         "mu": 4.0, "reps": 300, "seed": 3},
            "method": "simes", "u": 1, "alpha": 0.05, "adaptive_lambda": 0.5,
        }])
        out = tmp_path / "r.json"
        assert run(["verify", "--scenario", path, "--out", str(out)]) == 3
        report = json.loads(out.read_text())
        assert report["pass"] is False
        # simulate mode reports the same violation without the failing status
        assert run(["simulate", "--scenario", path, "--out", str(out)]) == 0

    def test_malformed_scenario_exits_2(self, tmp_path):
        path = write(tmp_path, "bad.json", "{not json")
        assert run(["verify", "--scenario", path]) == 2
        missing = self.scenario_file(tmp_path, [{"check": "fdr_pc", "scenario": {}}])
        assert run(["verify", "--scenario", missing]) == 2

    def test_shipped_reference_scenario_passes(self, tmp_path):
        out = tmp_path / "ref.json"
        assert run(["verify", "--scenario", str(REFERENCE),
                    "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["pass"] is True
        assert {r["check"] for r in report["records"]} == {
            "fdr_pc", "replicability", "dcc"}


class TestExitCodes:
    def test_out_of_range_pvalue(self, tmp_path):
        path = write(tmp_path, "m.csv", "0.5,1.5\n")
        assert run(["combine", path, "--method", "fisher"]) == 2

    def test_missing_file(self):
        assert run(["combine", "/nonexistent.csv", "--method", "fisher"]) == 2
