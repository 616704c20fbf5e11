import json
import subprocess
import sys

import jsonschema
import pytest

from sfcverify import REPORT_SCHEMA, scenarios
from sfcverify.cli import main

CORRECT = str(scenarios.path("figure1_correct"))
WRONG = str(scenarios.path("figure1_wrong"))
IDENTITY = str(scenarios.path("identity"))


def test_verify_correct(capsys):
    assert main(["verify", CORRECT]) == 0
    out = capsys.readouterr().out
    assert "v1: enforced" in out and "v2: enforced" in out


def test_verify_wrong(capsys):
    assert main(["verify", WRONG]) == 1
    assert "v1: violated" in capsys.readouterr().out


def test_verify_missing_file(capsys, tmp_path):
    assert main(["verify", str(tmp_path / "missing.scenario")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_verify_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.scenario"
    bad.write_text("service_functions: {}\npolicies: []\n")
    assert main(["verify", str(bad)]) == 2
    assert "chain" in capsys.readouterr().err


def test_action_error_exit_code(capsys, tmp_path):
    doc = tmp_path / "err.scenario"
    doc.write_text(
        "service_functions:\n"
        "  E: {rules: [{do: [{encrypt: {targets: [PL_4], params: aes}}]}]}\n"
        "chain: [E]\n"
        "policies:\n  - {name: v, input_traffic: [{proto: tcp}]}\n")
    assert main(["verify", str(doc)]) == 2
    assert "cannot encrypt" in capsys.readouterr().err


@pytest.mark.parametrize("path", [CORRECT, WRONG, IDENTITY])
def test_json_output_validates(capsys, path):
    main(["verify", path, "--format", "json"])
    jsonschema.validate(json.loads(capsys.readouterr().out), REPORT_SCHEMA)


def test_flags_override(capsys):
    main(["verify", WRONG, "--format", "json", "--absent-mode", "paper", "--match-mode", "exact"])
    data = json.loads(capsys.readouterr().out)
    assert data["options"] == {"absent_mode": "paper", "match_mode": "exact"}


def test_trace_wrong_v1(capsys):
    assert main(["trace", WRONG, "v1"]) == 1
    out = capsys.readouterr().out.splitlines()
    hops = [l for l in out if l.strip().startswith("(T_") and not l.strip().startswith("(T_0")]
    assert len(hops) == 3
    assert "[DROPPED]" in hops[-1] and "(con_db, 0)" in hops[-1]


def test_trace_correct_v1(capsys):
    assert main(["trace", CORRECT, "v1"]) == 0
    out = capsys.readouterr().out
    assert "(T_0, S_0)" in out and "{(con_db, 0)}" in out
    assert "TM(T_0, S_0)" in out and "(con_db, 1)" in out.split("TM(T_0, S_0)")[1].splitlines()[0]


def test_trace_identity(capsys):
    assert main(["trace", IDENTITY, "echo"]) == 0
    out = capsys.readouterr().out
    assert out.count("10.0.0.1") == 1


def test_trace_unknown_policy(capsys):
    assert main(["trace", CORRECT, "v9"]) == 2


def test_trace_json(capsys):
    main(["trace", CORRECT, "v1", "--format", "json"])
    assert json.loads(capsys.readouterr().out)["verdict"] == "enforced"


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sfcverify", "verify", WRONG],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and "P_false = {v1}" in proc.stdout
