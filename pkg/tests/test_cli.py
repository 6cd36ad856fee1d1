import json
import subprocess
import sys

import pytest

from froblift.cli import main, run


def _json(capsys, argv):
    code = main(["--json"] + argv)
    return code, json.loads(capsys.readouterr().out)


def test_witt_example(capsys):
    # [TRIVIAL] [1] + [1] = 2 = (0, 1) in W_2(F_2)
    code, rep = _json(capsys, ["witt", "--p", "2", "--add", "1,0", "1,0"])
    assert code == 0
    assert rep["payload"]["result"] == [0, 1] and rep["verdict"] == "OK"
    assert set(rep) == {"command", "payload", "verdict", "timing"}


def test_human_output(capsys):
    assert main(["witt", "--p", "2", "--add", "1,0", "1,0"]) == 0
    out = capsys.readouterr().out
    assert "result: [0, 1]" in out and "verdict: OK" in out


@pytest.mark.parametrize("argv,key,value", [
    (["hi", "--fan", "P2", "--D=-3,0,0"], "h", [0, 0, 1]),
    (["fedder", "--q", "7", "--f", "x^3+y^3+z^3"], "f_split", True),
    (["fedder", "--q", "5", "--f", "x^3+y^3+z^3"], "f_split", False),
    (["split-type", "--matrix", "t^2,0;0,t^-1"], "splitting_type", [2, -1]),
    (["split-check", "--p", "3", "--p1"], "coefficient", 0),
    (["fixed-points", "--q", "2", "--A", "0,0,1;1,0,0;0,1,0"], "count", 8),
])
def test_verbs(capsys, argv, key, value):
    code, rep = _json(capsys, argv)
    assert code == 0 and rep["payload"][key] == value


def test_dynkin_verdict(capsys):
    code, rep = _json(capsys, ["dynkin", "B2:2"])
    assert code == 0
    assert rep["payload"]["verdict"]["kind"] == "ProjSpace" and rep["payload"]["dim"] == 3


@pytest.mark.parametrize("argv", [
    ["dynkin", "A3:1,1"],
    ["fano-screen", "--csv", "/nonexistent/table.csv"],
    ["hi", "--fan", "nope", "--D", "1"],
    ["witt", "--p", "4", "--add", "1,0", "1,0"],
    ["fedder", "--q", "5", "--f", "x^^2"],
])
def test_input_errors_exit_2(capsys, argv):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_argparse_errors_exit_2(capsys):
    assert main(["witt"]) == 2
    assert main(["witt", "--p", "3"]) == 2


def test_repro_single_target(capsys):
    code, rep = _json(capsys, ["repro", "hirzebruch-delta"])
    assert code == 0 and rep["verdict"] == "PASS"
    (check,) = rep["payload"]["checks"]
    assert check["criterion"] == 11 and check["verdict"] == "PASS"


def test_repro_negative_screen_exits_1(capsys):
    assert main(["repro", "fano-negativity"]) == 1
    assert "[FAIL] criterion 10" in capsys.readouterr().out


def test_run_returns_report():
    # [TRIVIAL] 8 = -1 is the Teichmueller lift of 2 in Z/9
    rep = run(["witt", "--p", "3", "--from-int", "8"])
    assert rep["payload"]["result"] == [2, 0]


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "froblift.cli", "--json", "dynkin", "E8:8"],
                         capture_output=True, text=True, check=True).stdout
    assert json.loads(out)["payload"]["dim"] == 57
