import csv
import json
from fractions import Fraction as F

import pytest

from fairshare.cli import main


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGen:
    def test_same_seed_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["gen", "--class", "matroid-rank-random", "--n", "3", "--m", "6", "--seed", "5", "-o", str(a)]) == 0
        assert main(["gen", "--class", "matroid-rank-random", "--n", "3", "--m", "6", "--seed", "5", "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_fixture_output(self, capsys):
        code, out, _ = run(capsys, "gen", "--fixture", "example1")
        assert code == 0
        doc = json.loads(out)
        assert doc["goods"] == 6 and doc["agents"][1]["weight"] == "2"


class TestSolveCheckPipeline:
    def test_pick_then_mef1_passes(self, tmp_path, capsys):
        inst = tmp_path / "inst.json"
        alloc = tmp_path / "alloc.json"
        assert main(["gen", "--class", "submodular-table-random", "--n", "3", "--m", "6",
                     "--seed", "3", "--weights", "equal", "-o", str(inst)]) == 0
        assert main(["solve", "--instance", str(inst), "--rule", "pick", "--x", "1",
                     "-o", str(alloc)]) == 0
        code, out, _ = run(capsys, "check", "--instance", str(inst), "--allocation", str(alloc),
                           "--notion", "MEF1")
        assert code == 0
        assert json.loads(out)["verdict"] is True

    @pytest.mark.parametrize("rule,notion", [("pick", "WMEF"), ("transfer", "TWEF"), ("mwhw", "TWEF")])
    def test_solve_output_passes_guaranteed_notion_across_grid(self, rule, notion, tmp_path, capsys):
        inst = tmp_path / "inst.json"
        main(["gen", "--class", "matroid-rank-random", "--n", "3", "--m", "6", "--seed", "11",
              "-o", str(inst)])
        for x in ("0", "1/4", "1/2", "3/4", "1"):
            alloc = tmp_path / f"alloc_{x.replace('/', '_')}.json"
            assert main(["solve", "--instance", str(inst), "--rule", rule, "--x", x,
                         "-o", str(alloc)]) == 0
            code, out, _ = run(capsys, "check", "--instance", str(inst), "--allocation", str(alloc),
                               "--notion", notion, "--x", x)
            assert code == 0, (rule, x)
            assert json.loads(out)["verdict"] is True

    def test_fixture_ef1_check_fails_with_pair(self, capsys):
        code, out, _ = run(capsys, "check", "--fixture", "roundrobin-ef1", "--notion", "EF1")
        assert code == 1
        doc = json.loads(out)
        assert doc["verdict"] is False
        assert {"i": 2, "j": 1} == {k: doc["violations"][0][k] for k in ("i", "j")}

    def test_solve_trace_schema(self, tmp_path, capsys):
        inst = tmp_path / "inst.json"
        main(["gen", "--fixture", "roundrobin-ef1", "-o", str(inst)])
        code, out, _ = run(capsys, "solve", "--instance", str(inst), "--rule", "pick",
                           "--x", "0.5", "--trace")
        assert code == 0
        doc = json.loads(out)
        assert doc["bundles"] == [[2, 4, 6, 8], [1, 3, 5, 7]]
        assert doc["trace"]["x"] == "1/2"
        assert len(doc["trace"]["steps"]) == 8
        step = doc["trace"]["steps"][0]
        assert set(step) == {"turn", "agent", "good", "gain", "ratio"}

    def test_transfer_trace_schema(self, capsys):
        code, out, _ = run(capsys, "solve", "--fixture", "example1", "--rule", "transfer",
                           "--x", "0", "--trace")
        assert code == 0
        doc = json.loads(out)
        assert sorted(len(b) for b in doc["bundles"]) == [1, 5]

    def test_decimal_x_is_exact(self, capsys):
        code, out, _ = run(capsys, "check", "--fixture", "mwhw-nonclean", "--notion", "TWEF",
                           "--x", "0.25")
        assert code == 1
        assert json.loads(out)["x"] == "1/4"

    def test_rule_class_mismatch_errors(self, tmp_path, capsys):
        inst = tmp_path / "inst.json"
        main(["gen", "--class", "submodular-table-random", "--n", "2", "--m", "4",
              "--seed", "0", "-o", str(inst)])
        code, _, err = run(capsys, "solve", "--instance", str(inst), "--rule", "transfer", "--x", "0")
        assert code == 2
        assert "matroid-rank" in err

    def test_missing_instance_errors(self, capsys):
        code, _, err = run(capsys, "solve", "--rule", "pick", "--x", "0")
        assert code == 2 and "instance" in err


class TestOracleCommand:
    def test_optimum_report(self, capsys):
        code, out, _ = run(capsys, "oracle", "--fixture", "extended-harmonic",
                           "--objective", "hw-extended", "--maximizers")
        assert code == 0
        doc = json.loads(out)
        assert doc["argmax_count"] == 1
        assert doc["maximizers"] == [{"bundles": [[2, 3], [1]]}]

    def test_whw_requires_x(self, capsys):
        code, _, err = run(capsys, "oracle", "--fixture", "mwhw-nonclean", "--objective", "whw")
        assert code == 2 and "x" in err


class TestBench:
    def test_row_count_and_rates(self, tmp_path, capsys):
        out_csv = tmp_path / "bench.csv"
        code, _, err = run(capsys, "bench", "--class", "matroid-rank-random", "--n", "2",
                           "--m", "5", "--seeds", "4", "--x-grid", "0,1/2,1",
                           "--rules", "pick,transfer,mwhw", "-o", str(out_csv))
        assert code == 0
        rows = list(csv.DictReader(out_csv.open()))
        assert len(rows) == 4 * 3 * 3
        assert all(row["verdict"] == "True" for row in rows)
        for rule, notion in (("pick", "WMEF"), ("transfer", "TWEF"), ("mwhw", "TWEF")):
            assert f"rate rule={rule} notion={notion} 1.000" in err

    def test_rows_sorted_deterministically(self, tmp_path):
        out_csv = tmp_path / "bench.csv"
        main(["bench", "--class", "matroid-rank-random", "--n", "2", "--m", "4",
              "--seeds", "2", "--x-grid", "1,0", "--rules", "transfer,pick", "-o", str(out_csv)])
        rows = list(csv.DictReader(out_csv.open()))
        keys = [(int(r["seed"]), F(r["x"]), r["rule"]) for r in rows]
        assert keys == sorted(keys)
