import io
import json
import shutil
import subprocess
import sys

import pytest

from coxsys.cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFY, run


def _run(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def _json(*argv):
    code, text = _run(*argv, "--deterministic")
    return code, json.loads(text)


def test_minpoly():
    code, rep = _json("minpoly", "--k", "5")
    assert code == EXIT_OK
    assert rep["result"] == {"psi": [-1, -1, 1], "degree": 2}
    assert rep["config"]["k"] == 5 and "timestamp" not in rep["config"]


def test_timestamp_present_without_deterministic():
    code, text = _run("minpoly")
    assert "timestamp" in json.loads(text)["config"]


def test_deterministic_output_is_byte_identical():
    a = _run("arcs", "--k", "4", "--trials", "40", "--seed", "7", "--threads", "1", "--deterministic")
    b = _run("arcs", "--k", "4", "--trials", "40", "--seed", "7", "--threads", "1", "--deterministic")
    assert a == b and a[0] == EXIT_OK


def test_avoid_example():
    code, rep = _json("avoid", "--k", "4", "--m", "6", "--radius", "6")
    assert code == EXIT_OK and rep["result"]["pass"]


def test_avoid_failure_exits_2():
    code, rep = _json("avoid", "--k", "3", "--m", "1", "--radius", "6")
    assert code == EXIT_VERIFY and rep["result"]["pass"] is False
    assert rep["result"]["witness"] is not None


def test_bounds_example():
    code, rep = _json("bounds", "--primorials", "3")
    assert code == EXIT_OK
    assert [r["k"] for r in rep["result"]["rows"]] == [6, 30, 210]


def test_reduce_and_loop_reduce():
    code, rep = _json("reduce", "--k", "4", "--word", "2,1,2")
    assert code == EXIT_OK and rep["result"]["reduced"] == "1"
    code, rep = _json("reduce", "--k", "4", "--word", "1,3,1")
    assert rep["result"]["length"] == 3
    code, rep = _json("reduce", "--k", "4", "--word", "1,1,3")
    assert rep["result"]["reduced"] == "3"
    code, rep = _json("loop-reduce", "--k", "4", "--word", "1,2,1,2")
    assert code == EXIT_OK and rep["result"]["pass"] and rep["result"]["moveCount"] == 2


def test_loop_reduce_rejects_non_loop():
    code, rep = _json("loop-reduce", "--k", "4", "--word", "1,3,1,3")
    assert code == EXIT_USAGE and rep["result"]["error"] == "NOT_A_LOOP"


@pytest.mark.parametrize("cmd", [["partition"], ["gram"], ["relations"], ["hexagon"],
                                 ["norms", "--radius", "3", "--trials", "50"],
                                 ["ball", "--radius", "3"],
                                 ["quotient-order", "--k", "3", "--prime", "2", "--seeds", "2"]])
def test_subcommands_pass(cmd):
    code, rep = _json(*cmd)
    assert code == EXIT_OK
    assert rep["result"].get("pass", True) is not False


def test_order():
    code, rep = _json("order", "--k", "4", "--word", "1,3")
    assert rep["result"]["order"] == 4
    code, rep = _json("order", "--k", "4", "--word", "1,4", "--cap", "100")
    assert code == EXIT_OK and rep["result"]["error"] == "CAP_EXCEEDED"


def test_surface_export(tmp_path):
    path = tmp_path / "s.json"
    code, rep = _json("surface", "--pauli", "--export", str(path))
    assert code == EXIT_OK and rep["result"]["roundTrip"]
    assert rep["result"]["genus"] == 65 and path.exists()


def test_surface_gate_failure_exits_2():
    code, rep = _json("surface", "--k", "4", "--prime", "2")
    assert code == EXIT_VERIFY and rep["result"]["error"] == "CONDITION_11_2_VIOLATED"


def test_tsv_format():
    code, text = _run("minpoly", "--k", "4", "--format", "tsv", "--deterministic")
    lines = dict(line.split("\t") for line in text.strip().splitlines())
    assert lines["result.psi"] == "[-2, 0, 1]" and lines["config.k"] == "4"


@pytest.mark.parametrize("argv", [[], ["nosuch"], ["minpoly", "--k", "2"], ["reduce"],
                                  ["reduce", "--word", "1,x"], ["ball", "--radius", "-1"],
                                  ["arcs", "--threads", "0"], ["surface"],
                                  ["quotient-order", "--prime", "9"],
                                  ["surface", "--pauli", "--k", "5"]])
def test_usage_errors(argv, capsys):
    code, _ = _run(*argv)
    assert code == EXIT_USAGE
    assert capsys.readouterr().err or code == EXIT_USAGE


def test_console_script():
    exe = shutil.which("coxsys")
    cmd = [exe] if exe else [sys.executable, "-m", "coxsys.cli"]
    proc = subprocess.run(cmd + ["minpoly", "--k", "6", "--deterministic"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["psi"] == [-3, 0, 1]
