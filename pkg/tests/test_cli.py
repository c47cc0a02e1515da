from __future__ import annotations

import json
import subprocess
import sys

import pytest

from gamma2trace.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compute_text_k1(capsys):
    code, out, _ = run(capsys, "compute", "--k", "1", "--format", "text")
    assert code == 0
    assert "p = 2 - 4*x1*y1" in out.splitlines()
    assert "f = 1 - 4*x1*y1" in out


def test_compute_k0(capsys):
    code, out, _ = run(capsys, "compute", "--k", "0", "--format", "text")
    assert code == 0
    assert "p = 2" in out.splitlines()
    assert "h = 0" in out


def test_compute_with_sigma(capsys):
    code, out, _ = run(capsys, "compute", "--k", "1", "--sigma", "+-", "--format", "text")
    assert code == 0
    assert "p^σ = 6 + 4*x1 + 4*y1 + 4*x1*y1" in out


def test_compute_json_and_csv(capsys):
    _, out, _ = run(capsys, "compute", "--k", "1")
    obj = json.loads(out)
    assert obj["entries"]["p"] == {"k": 1, "terms": [{"vars": [], "coeff": "2"}, {"vars": [0, 1], "coeff": "-4"}]}
    _, out, _ = run(capsys, "compute", "--k", "1", "--format", "csv")
    assert "p,3,-4" in out.splitlines()


def test_compute_bad_sigma_is_usage_error(capsys):
    code, _, err = run(capsys, "compute", "--k", "2", "--sigma", "+-")
    assert code == 2 and "4 signs" in err


def test_verify_k3(capsys):
    code, out, _ = run(capsys, "verify", "--k", "3")
    obj = json.loads(out)
    assert code == 0
    assert obj["theorem"]["all_good"] and obj["theorem"]["sign_formula_holds"]


def test_verify_with_matrix(capsys):
    code, out, _ = run(capsys, "verify", "--k", "1", "--matrix", "[[3,2],[-2,-1]]")
    assert code == 0
    assert json.loads(out)["combination"]["all_good"]


def test_verify_bad_matrix_fails(capsys):
    code, out, _ = run(capsys, "verify", "--k", "1", "--matrix", "[[1,0],[0,-6]]")
    assert code == 1
    assert json.loads(out)["combination"]["counterexample"]["sigma"] == "-+"


def test_verify_k0_usage(capsys):
    code, _, _ = run(capsys, "verify", "--k", "0")
    assert code == 2


def test_verify_cap(capsys):
    code, _, err = run(capsys, "verify", "--k", "7")
    assert code == 2 and "--unsafe-large" in err


def test_verify_per_sigma(capsys):
    _, out, _ = run(capsys, "verify", "--k", "1", "--per-sigma")
    rows = json.loads(out)["theorem"]["per_sigma"]
    assert [r["sigma"] for r in rows] == ["++", "-+", "+-", "--"]
    assert rows[0]["pattern"] == "AllNonpos"


def test_goodness_mixed_fixture(capsys):
    code, out, _ = run(capsys, "goodness", "--poly", "-5 - 4*x1*y1")
    assert code == 1
    cx = json.loads(out)["goodness"]["counterexample"]
    assert cx["positive"]["monomial"] == "x1" and cx["negative"]["monomial"] == "1"


def test_goodness_matrix(capsys):
    code, _, _ = run(capsys, "goodness", "--k", "2", "--matrix", "[[5,2],[2,1]]")
    assert code == 0


def test_certify_small(capsys):
    code, out, _ = run(capsys, "certify", "--depth", "4", "--k", "2", "--samples", "5")
    obj = json.loads(out)
    assert code == 0
    assert obj["ok"] and obj["delta"]["depth"] == 4 and obj["schema_version"] == 1


def test_certify_csv(capsys):
    code, out, _ = run(capsys, "certify", "--depth", "2", "--k", "1", "--format", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "check,ok,instances"
    assert {line.split(",")[0] for line in lines[1:]} == {"identities", "cone", "recursion", "base_case", "delta"}


def test_certify_depth0_usage(capsys):
    assert run(capsys, "certify", "--depth", "0")[0] == 2


def test_certify_corrupted_constant(capsys):
    code, out, _ = run(capsys, "certify", "--depth", "2", "--k", "1", "--constant", "A6=[[5,-2],[-2,2]]")
    obj = json.loads(out)
    assert code == 1
    assert obj["identities"]["ok"] is False
    assert any(f.get("identity") == "A6 = A_inv B" for f in obj["failures"])


def test_certify_non_decreasing_generator(capsys):
    code, out, _ = run(capsys, "certify", "--depth", "2", "--k", "1", "--constant", "A5=[[1,0],[0,0]]")
    obj = json.loads(out)
    assert code == 1
    assert {"check": "delta", "word": "5", "property": "decreasing", "matrix": [[1, 0], [0, 0]]} in obj["failures"]


def test_oracle_points(capsys):
    code, out, _ = run(capsys, "oracle", "--k", "1", "--point", "1,1")
    obj = json.loads(out)
    assert code == 0 and obj["oracle"] == obj["polynomial"] == "-2"
    _, out, _ = run(capsys, "oracle", "--k", "2", "--point", "1,1,1,1")
    assert json.loads(out)["oracle"] == "2"


def test_oracle_trials(capsys):
    code, out, _ = run(capsys, "oracle", "--k", "4", "--seed", "7")
    obj = json.loads(out)
    assert code == 0 and obj["agree"] == obj["trials"] == 1000


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--k", "3", "--jobs", "1,2")
    obj = json.loads(out)
    assert code == 0
    assert obj["schema_version"] == 1
    assert obj["compute"][0] == {**obj["compute"][0], "k": 1, "terms": 2}
    assert [r["jobs"] for r in obj["sweep"]["runs"]] == [1, 2]


def test_output_is_deterministic(capsys):
    outs = {run(capsys, "certify", "--depth", "3", "--k", "2", "--samples", "4", "--seed", "5")[1] for _ in range(2)}
    assert len(outs) == 1
    outs = {run(capsys, "verify", "--k", "2", "--per-sigma", "--jobs", str(j))[1] for j in (1, 2)}
    assert len(outs) == 1


def test_output_file(tmp_path, capsys):
    target = tmp_path / "p.json"
    assert run(capsys, "compute", "--k", "2", "--output", str(target))[0] == 0
    assert json.loads(target.read_text())["k"] == 2


def test_argparse_errors_exit_2():
    proc = subprocess.run([sys.executable, "-m", "gamma2trace", "verify", "--k", "x"], capture_output=True)
    assert proc.returncode == 2


def test_env_jobs(monkeypatch, capsys):
    monkeypatch.setenv("GAMMA2TRACE_JOBS", "2")
    code, out, _ = run(capsys, "verify", "--k", "2")
    assert code == 0
