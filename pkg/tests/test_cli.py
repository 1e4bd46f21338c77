import json
import subprocess
import sys

from congrua.cli import cmd_adjoint_lvalue, cmd_congruence_number, cmd_verify_formalism, main

from test_formalism import corrupt


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_verify_formalism_zero_count(capsys):
    code, doc = run(["verify-formalism", "--count", "0"], capsys)
    assert code == 0 and doc["schema"] == 1 and doc["ok"]


def test_verify_formalism_negative_control():
    code, doc = cmd_verify_formalism(3, 2, mutate=corrupt)
    assert code == 1
    assert doc["counterexamples"]


def test_verify_formalism_is_byte_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["verify-formalism", "--seed", "4", "--count", "3", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_congruence_number(capsys):
    code, doc = run(["congruence-number", "--level", "11", "--weight", "2", "--prime", "3"], capsys)
    assert code == 0
    assert doc["eta_valuation"] == 0 and doc["eta_coh_valuation"] == 0
    assert doc["freeness_verified"] is True and doc["oracle_valuation"] == 0


def test_congruence_number_refusals():
    for N, k, p in ((11, 2, 5), (1, 12, 691)):
        code, doc = cmd_congruence_number(N, k, p)
        assert code == 2 and doc["refused"] and doc["error"] == "EisensteinIdeal"
    code, doc = cmd_congruence_number(11, 2, 11)
    assert code == 2 and doc["error"] == "HypothesisViolation"
    assert "divide" in doc["hypothesis"]


def test_adjoint_lvalue_and_cache(tmp_path, monkeypatch, capsys):
    cache = tmp_path / "env.jsonl"
    monkeypatch.setenv("CONGRUA_CACHE", str(cache))
    code, doc = run(["adjoint-lvalue", "--level", "11", "--disc", "1", "--prime", "3", "--cache", str(tmp_path / "flag.jsonl")], capsys)
    assert code == 0
    assert doc["valuations"] == {"3": 0}
    assert doc["rational"] == {"num": 8, "den": 11}
    assert {"coefficient_budget", "error_bound", "detection"} <= set(doc["provenance"])
    assert cache.exists() and not (tmp_path / "flag.jsonl").exists()
    rec = json.loads(cache.read_text().splitlines()[-1])
    assert rec["level"] == 11 and rec["a_n"][:4] == [0, 1, -2, -1]


def test_adjoint_lvalue_refusals():
    code, doc = cmd_adjoint_lvalue(11, 2, 33, [3])
    assert code == 2 and doc["error"] == "ConditionViolated"
    code, doc = cmd_adjoint_lvalue(11, 2, 5, [3], budget=50)
    assert code == 2 and doc["error"] == "SlowConvergence"


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "congrua.cli", "congruence-number", "--level", "11", "--prime", "5"], capture_output=True, text=True)
    assert out.returncode == 2
    assert json.loads(out.stdout)["error"] == "EisensteinIdeal"
