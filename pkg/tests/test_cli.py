import json
import subprocess
import sys
from fractions import Fraction

import pytest

from pacfol.cli import main

from conftest import ROOT

SAMPLES = f"{ROOT}/samples"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_entail(capsys):
    code, out, _ = run(capsys, "entail", "--kb", f"{SAMPLES}/grad.kb", "--query", f"{SAMPLES}/q1.q")
    assert code == 0 and out.strip() == "ENTAILED"
    code, out, _ = run(capsys, "entail", "--kb", f"{SAMPLES}/grad_weak.kb", "--query",
                       f"{SAMPLES}/q1.q", "--witness")
    assert code == 1
    assert out.splitlines()[0] == "NOT ENTAILED"
    assert "Grad(logan) = 0" in out


def test_entail_limited(capsys):
    code, out, _ = run(capsys, "entail-limited", "--kb", f"{SAMPLES}/grad.kb", "--query",
                       f"{SAMPLES}/q1.q", "-z", "2")
    assert code == 0 and out.strip() == "ENTAILED at z=0"
    code, out, _ = run(capsys, "entail-limited", "--kb", f"{SAMPLES}/grad_weak.kb", "--query",
                       f"{SAMPLES}/q1.q", "-z", "1")
    assert code == 1 and out.strip() == "UNKNOWN at z=1"


def test_ground(capsys):
    code, out, _ = run(capsys, "ground", "--kb", f"{SAMPLES}/grad.kb", "--names", "logan")
    assert code == 0
    assert sorted(out.splitlines()) == sorted([
        "Grad(charles) | Prof(charles)", "Grad(logan) | Prof(logan)", "Grad(logan)"])


def test_samplesize(capsys):
    assert run(capsys, "samplesize", "--gamma", "0.1", "--delta", "0.1")[1].strip() == "150"


def test_learn(capsys):
    code, out, _ = run(capsys, "learn", "--kb", f"{SAMPLES}/person.kb", "--query", f"{SAMPLES}/q1.q",
                       "--examples", f"{SAMPLES}/examples.jsonl", "-k", "1", "--trace",
                       "--threshold", "3/4")
    assert code == 1
    lines = out.splitlines()
    assert lines[0].startswith("p_hat = 2/4")
    report = json.loads(lines[1])
    assert (report["v"], report["m"]) == (2, 4) and len(report["trace"]) == 4
    assert Fraction(report["p_hat"]) == Fraction(1, 2)


def test_usage_errors(capsys, tmp_path):
    bad = tmp_path / "bad.kb"
    bad.write_text("forall x: P(x\n")
    code, _, err = run(capsys, "entail", "--kb", str(bad), "--query", f"{SAMPLES}/q1.q")
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "entail", "--kb", str(tmp_path / "missing.kb"), "--query", f"{SAMPLES}/q1.q")
    assert code == 2
    assert run(capsys, "samplesize", "--gamma", "2", "--delta", "0.1")[0] == 2
    with pytest.raises(SystemExit):
        main(["entail"])


def test_resource_limit(capsys, tmp_path):
    kb = tmp_path / "hard.kb"
    kb.write_text("forall x,y: R(x,y) | R(y,x) | S(x)\nforall x,y: !R(x,y) | !S(y)\n")
    q = tmp_path / "q"
    q.write_text("S(a) & S(b) | R(a,b)")
    code, _, err = run(capsys, "entail", "--kb", str(kb), "--query", str(q), "--step-cap", "1")
    assert code == 3 and "step" in err.lower()


def test_simulate_is_byte_reproducible():
    cmd = [sys.executable, "-m", "pacfol", "simulate", "--config", f"{SAMPLES}/cal.toml", "--seed", "42"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b
    report = json.loads(a)
    assert report["m"] == 150 and report["seed"] == 42
