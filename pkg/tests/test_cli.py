import csv
import io
import json

import pytest

from bandgrowth import gfset
from bandgrowth.cli import main
from bandgrowth.gfset import DenseSet


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_from_delta(capsys):
    code, out, _ = run(capsys, "construct", "--delta", "1/2", "--K", "2")
    rep = json.loads(out)
    assert code == 0
    assert (rep["k"], rep["m"], rep["sizeB"]) == (9, 812, str(812**2))
    assert rep["hypothesisMet"] is True
    assert int(rep["exactProbNum"]) * 9 >= 7 * int(rep["exactProbDen"])


def test_construct_toy_and_errors(capsys):
    code, out, _ = run(capsys, "construct", "--m", "4", "--k", "3", "--unchecked")
    assert code == 0 and json.loads(out)["sizeA"] == "38416"
    code, _, err = run(capsys, "construct", "--delta", "2")
    assert code == 2 and "delta" in err
    code, _, err = run(capsys, "construct", "--m", "4", "--k", "3")
    assert code == 2 and "unchecked" in err
    with pytest.raises(SystemExit) as exc:
        main(["construct", "--bogus"])
    assert exc.value.code == 2


def test_closure_with_sampling_and_bruteforce(capsys):
    code, out, _ = run(capsys, "closure", "--m", "4", "--k", "3", "--unchecked",
                       "--samples", "5000", "--seed", "3", "--bruteforce")
    rep = json.loads(out)
    assert code == 0
    assert rep["bruteforceMatches"] and (rep["bruteforceNum"], rep["bruteforceDen"]) == ("6", "7")
    assert rep["mcSeed"] == 3 and len(rep["mcCI"]) == 2


def test_isoperimetry_json_lines_and_csv(capsys):
    code, out, _ = run(capsys, "isoperimetry", "--D", "11", "--k", "1", "--trials", "5", "--seed", "2")
    lines = [json.loads(ln) for ln in out.splitlines()]
    assert code == 0 and len(lines) == 5 and [r["trial"] for r in lines] == list(range(5))
    assert all(r["passes"] and r["seed"] == 2 for r in lines)
    code, out, _ = run(capsys, "isoperimetry", "--D", "41", "--k", "2", "--trials", "2",
                       "--sparse", "--max-size", "50", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 2 and rows[0]["D"] == "41"


def test_witness_commands(capsys):
    code, out, _ = run(capsys, "witness-column", "--m", "4", "--k", "3", "--unchecked", "--dense-check")
    rep = json.loads(out)
    assert code == 0 and rep["denseMatches"] and (rep["ratioNum"], rep["ratioDen"]) == ("8", "7")
    code, out, _ = run(capsys, "witness-row", "--m", "4", "--k", "3", "--unchecked", "--K", "3/2")
    rep = json.loads(out)
    assert code == 0 and rep["blockSetSize"] == 12 and rep["withinK"] and rep["ratioNum"] == "1"


def test_claim4_command(capsys, tmp_path):
    code, out, _ = run(capsys, "claim4", "--m", "11", "--k", "1", "--unchecked", "--size", "30")
    rep = json.loads(out)
    assert code == 0 and rep["disjoint"] and len(rep["blocks"]) == 11
    fam = tmp_path / "fam.txt"
    fam.write_text("2: 0,1,2,3,4,5,6,7,8,9,10\n")
    pts = tmp_path / "pts.txt"
    v = gfset.pack_blocks(11, [0b11111] * 11)
    pts.write_text(f"sparse m=11 r=11\n{v:x}\n")
    code, out, _ = run(capsys, "claim4", "--m", "11", "--k", "1", "--unchecked",
                       "--family", str(fam), "--points", str(pts))
    rep = json.loads(out)
    assert code == 0 and rep["blocks"] == [{"j": 2, "fibers": 1, "outside": "11",
                                            "singleBlockViolations": 0, "passes": True}]


def test_bound_diag_command(capsys, tmp_path):
    fam = tmp_path / "fam.txt"
    fam.write_text("0: " + ",".join(map(str, range(12))) + "\n")
    code, out, _ = run(capsys, "bound-diag", "--family", str(fam), "--m", "12", "--K", "2", "--k", "1")
    rep = json.loads(out)
    assert code == 0 and rep["sizeBprime"] == 12 and rep["goodCount"] == 1 and rep["bound"] == 132


def _write(path, S):
    with open(path, "w") as fh:
        gfset.write_set(S, fh)


def test_petridis_and_ruzsa_commands(capsys, tmp_path):
    A, B = tmp_path / "a.txt", tmp_path / "b.txt"
    _write(A, DenseSet.from_indices(2, [0, 1]))
    _write(B, DenseSet.from_indices(2, [0, 2]))
    code, out, _ = run(capsys, "petridis", "--A", str(A), "--B", str(B))
    rep = json.loads(out)
    assert code == 0 and rep["K0"] == {"num": "2", "den": "1"} and rep["X"] == ["0", "1"]
    code, out, _ = run(capsys, "ruzsa-verify", "--A", str(A), "--B", str(B), "--k", "2")
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "witness"
    code, _, err = run(capsys, "ruzsa-verify", "--A", str(A), "--B", str(B), "--K", "1")
    assert code == 2 and "hypothesis" in err
    code, out, _ = run(capsys, "petridis", "--seed", "5")
    assert code == 0 and json.loads(out)["violations"] == []


def test_compare_fp_command(capsys):
    code, out, _ = run(capsys, "compare-fp", "--p", "3", "--n", "4")
    rep = json.loads(out)
    assert code == 0 and rep["closure"] == {"num": "1", "den": "2"}
    assert [g["size"] for g in rep["growth"]] == [16, 28, 38, 47]


def test_bench_command(capsys):
    code, out, _ = run(capsys, "bench", "--D", "12", "--repetitions", "2")
    rows = json.loads(out)
    assert code == 0 and {r["kernel"] for r in rows} >= {"sumset", "iterated_sumset_k2"}
    code, out, _ = run(capsys, "bench", "--D", "12", "--repetitions", "0")
    assert code == 0 and json.loads(out) == []
    code, _, err = run(capsys, "bench", "--D", "29")
    assert code == 2


SMALL = ["--trials", "20", "--sparse-trials", "2", "--max-size", "100",
         "--petridis-instances", "5", "--samples", "2000"]


def test_verify_all_small(capsys):
    code, out, _ = run(capsys, "verify-all", *SMALL)
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and rep["failed"] == [] and rep["seed"] == 0
    assert {c["id"] for c in rep["checks"]} >= {"claim4", "petridis", "compare-fp", "ratio-chain"}


def test_verify_all_injected_failure(capsys, caplog):
    code, out, _ = run(capsys, "verify-all", *SMALL, "--inject-failure", "witness-row")
    assert code == 1 and json.loads(out)["failed"] == ["witness-row"]
    assert "witness-row" in caplog.text


def test_verify_all_csv(capsys):
    code, out, _ = run(capsys, "verify-all", *SMALL, "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and all(r["passed"] == "True" for r in rows)


def test_output_file(capsys, tmp_path):
    dest = tmp_path / "rep.json"
    code, out, _ = run(capsys, "compare-fp", "--output", str(dest))
    assert code == 0 and out == "" and json.loads(dest.read_text())["p"] == 3
