import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from sofic import builder
from sofic.cli import main, split_labels
from sofic.fixtures import load_fixture
from sofic.monoids import make_transformation_monoid, write_monoid
from sofic.witness import diagonal_power_witness, write_witness


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_split_labels():
    assert split_labels("x,(y,0)") == ["x", "(y,0)"]
    assert split_labels("{1},{-1}, 0+2Z ,1+3Z") == ["{1}", "{-1}", "0+2Z", "1+3Z"]
    assert split_labels("(1,0),(0,-1)") == ["(1,0)", "(0,-1)"]


def test_fixtures_list(capsys):
    code, out, _ = run(capsys, "fixtures", "list")
    names = [r["name"] for r in json.loads(out)]
    assert code == 0 and {"T2", "bicyclic", "F2xS", "coset-Z-2-3"} <= set(names)


def test_analyze_text(capsys):
    code, out, _ = run(capsys, "analyze", "--fixture", "T2", "--format", "text")
    assert code == 0
    assert "2 D-classes" in out and out.count("D-class ") == 2


def test_analyze_json_and_structured(capsys):
    code, out, _ = run(capsys, "analyze", "--fixture", "T3")
    doc = json.loads(out)
    assert doc["unit_group_order"] == 6 and doc["class_counts"]["D"] == 3
    code, out, _ = run(capsys, "analyze", "--fixture", "bicyclic")
    assert code == 0 and json.loads(out)["declared"]["units_equal_j_class"] is False


def test_hypotheses(capsys):
    code, out, _ = run(capsys, "hypotheses", "--fixture", "coset-Z-2-3", "--K", "{1},0+2Z")
    assert code == 0
    assert json.loads(out)["matched_conditions"] == ["locally-amenable", "amenable-units"]


def test_build_then_check(tmp_path, capsys):
    w, p = tmp_path / "w.json", tmp_path / "p.json"
    code, out, _ = run(capsys, "build-witness", "--fixture", "T2", "--K", "all", "--eps", "1/5",
                       "--out", str(w), "--provenance", str(p))
    assert code == 0
    prov = json.loads(p.read_text())
    for key in ("delta", "F_size", "F_quality", "P_size", "Y_size", "Z_size", "N",
                "good_fraction", "folner_strategy"):
        assert key in prov
    assert json.loads(out) == prov
    code, out, _ = run(capsys, "check-witness", "--fixture", "T2", "--witness", str(w),
                       "--eps", "1/5", "--format", "text")
    assert code == 0 and out.splitlines()[0] == "PASS"
    # too strict a target fails honestly
    code, out, _ = run(capsys, "check-witness", "--fixture", "T2", "--witness", str(w),
                       "--eps", "1/1000")
    assert code == 3 and json.loads(out)["result"] == "FAIL"


def test_cli_matches_library_bytes(tmp_path, capsys):
    w, p = tmp_path / "w.json", tmp_path / "p.json"
    run(capsys, "build-witness", "--fixture", "coset-Z-2-3", "--K", "{1},{-1},0+2Z,1+3Z",
        "--eps", "1/4", "--out", str(w), "--provenance", str(p))
    M = load_fixture("coset-Z-2-3")
    K = [M.parse(s) for s in ("{1}", "{-1}", "0+2Z", "1+3Z")]
    W, log = builder.build_witness(M, K, F(1, 4))
    assert w.read_text() == W.to_json()
    assert p.read_text() == log.to_json()


def test_refusal(tmp_path, capsys):
    w = tmp_path / "w.json"
    code, _, err = run(capsys, "build-witness", "--fixture", "F2xS", "--K", "x,(y,0)",
                       "--eps", "1/4", "--out", str(w))
    assert code == 2
    assert "HypothesesNotMet: orbit quotient declared non-amenable" in err
    assert "[builder]" in err
    assert not w.exists()


def test_cap_refusal(capsys, monkeypatch):
    monkeypatch.setenv("SOFIC_GROUND_CAP", "10")
    code, _, err = run(capsys, "build-witness", "--fixture", "T2", "--K", "all", "--eps", "1/5")
    assert code == 2 and "CapExceeded" in err


@pytest.mark.parametrize("argv", [
    ["analyze", "--fixture", "nope"],
    ["build-witness", "--fixture", "T2", "--K", "zz", "--eps", "1/5"],
    ["build-witness", "--fixture", "T2", "--K", "all", "--eps", "1/0"],
    ["build-witness", "--fixture", "T2", "--K", "all", "--eps", "2"],
    ["check-witness", "--fixture", "T2", "--witness", "/nonexistent", "--eps", "1/5"],
    ["frobnicate"],
    ["build-witness", "--fixture", "T2", "--K", "all", "--eps", "1/5", "--workers", "0"],
    ["oracle-witness", "--fixture", "bicyclic", "--K", "p,q", "--eps", "1/5"],
])
def test_malformed_input(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 1


def test_malformed_witness_file(tmp_path, capsys):
    w = tmp_path / "w.json"
    w.write_text('{"N": 2, "elements": [')
    code, _, err = run(capsys, "check-witness", "--fixture", "T2", "--witness", str(w),
                       "--eps", "1/5")
    assert code == 1 and "MalformedFile" in err and "[witness]" in err


def test_monoid_file(tmp_path, capsys):
    path = tmp_path / "t3.json"
    write_monoid(path, make_transformation_monoid(3))
    code, out, _ = run(capsys, "analyze", "--monoid", str(path))
    assert code == 0 and json.loads(out)["size"] == 27
    code, out, _ = run(capsys, "build-witness", "--monoid", str(path), "--K", "000,102,120",
                       "--eps", "1/5")
    assert code == 0


def test_oracle(tmp_path, capsys):
    w = tmp_path / "w.json"
    code, out, _ = run(capsys, "oracle-witness", "--fixture", "SL2", "--K", "0,1", "--eps", "1/10",
                       "--out", str(w))
    doc = json.loads(out)
    assert code == 0 and doc["exponent"] == 4 and doc["N"] == 16
    assert doc["max_sep_overlap"] == "1/16" and doc["mode"] == "materialised"
    M = load_fixture("SL2")
    assert w.read_text() == diagonal_power_witness(M, [0, 1], F(1, 10)).to_json()
    code, out, _ = run(capsys, "oracle-witness", "--fixture", "T3", "--K", "all",
                       "--eps", "1/1000000")
    assert code == 0 and json.loads(out)["mode"] == "implicit"


def test_folner(capsys):
    code, out, _ = run(capsys, "folner", "--group", "Z", "--K", "1,-1", "--box", "10")
    assert json.loads(out) == {"group": "Z", "K": ["1", "-1"], "F_size": 10, "quality": "4/5"}
    code, out, _ = run(capsys, "folner", "--group", "Z", "--K", "1,-1", "--delta", "1/5")
    assert json.loads(out)["F_size"] == 11 and json.loads(out)["quality"] == "9/11"
    code, out, _ = run(capsys, "folner", "--group", "Z^2", "--K", "(1,0),(-1,0),(0,1),(0,-1)",
                       "--box", "10")
    assert json.loads(out)["quality"] == "16/25"
    code, _, err = run(capsys, "folner", "--group", "Z^2", "--K", "(1,0),(0,1)", "--delta", "1/1000",
                       "--search-budget", "100")
    assert code == 2 and "SearchBudgetExceeded" in err


def test_probe(capsys):
    code, out, _ = run(capsys, "probe-bicyclic", "--N", "100")
    doc = json.loads(out)
    assert code == 0
    assert {"g": "1", "h": "qp", "overlap": "99/100"} in doc["sep_overlaps"]


def test_check_with_explicit_k_and_workers(tmp_path, capsys):
    M = load_fixture("T3")
    w = tmp_path / "w.json"
    write_witness(w, diagonal_power_witness(M, M.elements()[:5], F(1, 10)))
    outs = set()
    for workers in ("1", "2", "8"):
        code, out, _ = run(capsys, "check-witness", "--fixture", "T3", "--witness", str(w),
                           "--eps", "1/10", "--workers", workers)
        assert code == 0
        outs.add(out)
    assert len(outs) == 1


def test_entry_point_subprocess():
    proc = subprocess.run([sys.executable, "-m", "sofic", "fixtures", "list", "--format", "text"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "bicyclic" in proc.stdout
