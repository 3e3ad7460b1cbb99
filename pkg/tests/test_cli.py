import csv
import io
import json

import pytest

from contactsolitons import specfile, zoo
from contactsolitons.cli import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestValidate:
    def test_zoo_entry_passes(self, capsys):
        code, out, _ = run(capsys, "validate", "--zoo", "paper-kenmotsu")
        assert code == EXIT_PASS
        doc = json.loads(out)
        assert doc["verdict"] == "pass"
        assert doc["classification"] == "Kenmotsu"

    def test_spec_file(self, capsys, tmp_path):
        path = tmp_path / "flat.json"
        specfile.export(zoo.load("flat-cosymplectic-3"), path)
        code, out, _ = run(capsys, "validate", str(path))
        assert code == EXIT_PASS
        assert json.loads(out)["classification"] == "cosymplectic"

    def test_csv_format(self, capsys):
        code, out, _ = run(capsys, "validate", "--zoo", "sasakian-r3", "--format", "csv")
        assert code == EXIT_PASS
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["check", "status", "max_residual", "max_relative", "tolerance"]
        assert all(r[1] == "pass" for r in rows[1:])


class TestCurvature:
    def test_invariants_pass(self, capsys):
        code, out, _ = run(capsys, "curvature", "--zoo", "alpha-kenmotsu-2")
        assert code == EXIT_PASS

    def test_frame_tables(self, capsys):
        code, out, _ = run(capsys, "curvature", "--zoo", "paper-kenmotsu", "--frame")
        assert code == EXIT_PASS
        doc = json.loads(out)
        tables = doc["frame_tables"]
        ric = tables["ricci"]
        assert ric[0][0] == pytest.approx(-2.0, abs=1e-12)
        assert tables["scal"] == pytest.approx(-6.0, abs=1e-12)


class TestCheckSoliton:
    def test_single_candidate_passes(self, capsys):
        code, out, _ = run(
            capsys, "check-soliton", "--zoo", "paper-kenmotsu", "--candidate", "v-riemann"
        )
        assert code == EXIT_PASS

    def test_xi_candidate_fails(self, capsys):
        code, out, _ = run(
            capsys, "check-soliton", "--zoo", "paper-kenmotsu", "--candidate", "xi-ricci"
        )
        assert code == EXIT_FAIL
        doc = json.loads(out)
        assert doc["verdict"] == "fail"

    def test_all_flat_passes(self, capsys):
        code, out, _ = run(capsys, "check-soliton", "--zoo", "flat-cosymplectic-3", "--all")
        assert code == EXIT_PASS

    def test_solve_lambda_reports_range(self, capsys):
        code, out, _ = run(
            capsys, "check-soliton", "--zoo", "paper-kenmotsu",
            "--candidate", "v-ricci", "--solve-lambda",
        )
        assert code == EXIT_PASS
        doc = json.loads(out)
        solve = [c for c in doc["checks"] if c["name"].endswith("solve-lambda")][0]
        lo, hi = solve["details"]["lambda_range"]
        assert lo < hi

    def test_requires_candidate_selection(self, capsys):
        code, _, err = run(capsys, "check-soliton", "--zoo", "paper-kenmotsu")
        assert code == EXIT_INPUT
        assert "candidate" in err

    def test_tight_tolerance_fails(self, capsys):
        code, out, _ = run(
            capsys, "check-soliton", "--zoo", "paper-kenmotsu",
            "--candidate", "v-riemann", "--tol", "1e-15",
        )
        assert code == EXIT_FAIL


class TestVerifyPaper:
    def test_passes(self, capsys):
        code, out, _ = run(capsys, "verify-paper")
        assert code == EXIT_PASS
        doc = json.loads(out)
        names = [c["name"] for c in doc["checks"]]
        assert "ricci-diagonal" in names
        assert "transfer-lambda" in names

    def test_table_format(self, capsys):
        code, out, _ = run(capsys, "verify-paper", "--format", "table")
        assert code == EXIT_PASS
        assert "verdict: pass" in out


class TestErrors:
    def test_unknown_zoo_name(self, capsys):
        code, _, err = run(capsys, "validate", "--zoo", "nope")
        assert code == EXIT_INPUT
        assert "nope" in err

    def test_missing_input(self, capsys):
        code, _, err = run(capsys, "validate")
        assert code == EXIT_INPUT

    def test_bad_json_file(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{]")
        code, _, err = run(capsys, "validate", str(p))
        assert code == EXIT_INPUT
        assert "invalid JSON" in err

    def test_bad_grid(self, capsys):
        code, _, err = run(capsys, "validate", "--zoo", "paper-kenmotsu", "--grid", "z=1")
        assert code == EXIT_INPUT
        assert "--grid" in err


class TestDeterminism:
    def test_byte_identical_reports(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        argv = ["check-soliton", "--zoo", "paper-kenmotsu", "--all",
                "--seed", "42", "--samples", "25"]
        assert main(argv + ["--out", str(a)]) == EXIT_FAIL
        assert main(argv + ["--out", str(b)]) == EXIT_FAIL
        assert a.read_bytes() == b.read_bytes()

    def test_seed_changes_random_points(self, capsys):
        _, out1, _ = run(capsys, "validate", "--zoo", "paper-kenmotsu", "--seed", "1")
        _, out2, _ = run(capsys, "validate", "--zoo", "paper-kenmotsu", "--seed", "2")
        assert out1 != out2


class TestOverrides:
    def test_grid_and_samples(self, capsys):
        code, out, _ = run(
            capsys, "validate", "--zoo", "paper-kenmotsu",
            "--grid", "x=0:0:1,y=0:0:1,z=1.2:1.8:3", "--samples", "5",
        )
        assert code == EXIT_PASS
        doc = json.loads(out)
        # 3 grid points + 5 random points
        first_axiom = doc["checks"][0]["children"][0]
        assert len(first_axiom["point_residuals"]) == 8

    def test_out_file(self, tmp_path):
        out = tmp_path / "r.json"
        assert main(["validate", "--zoo", "sasakian-r3", "--out", str(out)]) == EXIT_PASS
        assert json.loads(out.read_text())["verdict"] == "pass"
