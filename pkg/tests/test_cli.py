import io
import json
import re
import subprocess
import sys

import pytest

from tidyscale.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_scale_matrix():
    code, out = run("scale", "--family", "matrix", "--p", "5", "--diag", "5,1/5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "25"
    methods = {ln.split(":")[0].strip() for ln in lines[1:]}
    assert {"closed_form", "index_at_tidy", "lattice_coindex", "minimized_over_filtration"} <= methods
    assert all(ln.endswith(": 25") for ln in lines[1:])


def test_scale_json_and_unipotent():
    code, out = run("scale", "--family", "matrix", "--p", "5", "--matrix", "1,1;0,1", "--json", "--inverse")
    obj = json.loads(out)
    assert code == 0 and obj["scale"]["value"] == "1" and obj["scale_inverse"]["value"] == "1"
    code, out = run("scale", "--family", "matrix", "--p", "5", "--matrix", '[["25","0","0"],["0","5","0"],["0","0","1/125"]]')
    assert out.splitlines()[0] == str(5**10)


def test_scale_shift_and_tree():
    assert run("scale", "--family", "shift", "--F", "C4", "--O", "C2")[1].splitlines()[0] == "1"
    assert run("scale", "--family", "tree", "--q", "3", "--l", "2")[1].splitlines()[0] == "9"


def test_tidy_shift():
    code, out = run("tidy", "--family", "shift", "--F", "S3", "--O", "A3", "--constraint", "0:trivial")
    assert code == 0
    assert "O'': all-O" in out
    assert re.search(r"^scale: 1$", out, re.M)
    code, out = run("tidy", "--family", "shift", "--F", "S3", "--O", "A3", "--constraint", "0:trivial", "--json")
    obj = json.loads(out)
    assert obj["scale"] == "1" and obj["schema"] == "tidyscale.tidy-report/1"


def test_tidy_matrix_and_tree():
    _, out = run("tidy", "--family", "matrix", "--p", "5", "--diag", "5,1/5", "--json")
    obj = json.loads(out)
    assert obj["scale"] == obj["scale_inverse"] == "25"
    _, out = run("tidy", "--family", "tree", "--q", "2", "--l", "1", "--segment", "0:2")
    assert "scale: 2" in out


def test_member():
    code, out = run("member", "--family", "matrix", "--p", "5", "--diag", "5,1/5", "--x", "1,0;1,1", "--target", "U")
    assert code == 0 and out.startswith("U: No")
    _, out = run("member", "--family", "shift", "--x", "0:(12)", "--target", "P")
    assert out.startswith("P: No")
    _, out = run("member", "--family", "matrix", "--p", "5", "--matrix", "1,1;0,1", "--x", "1,0;1,1", "--json")
    assert json.loads(out)["verdict"] == "Unknown"


def test_tree_dot():
    code, out = run("tree", "--family", "matrix", "--p", "2", "--diag", "2,1/2", "--depth", "2", "--format", "dot")
    assert code == 0
    assert out.startswith("digraph coset_tree {")
    root = re.findall(r"^\s*m0_0 -> (\S+)", out, re.M)
    assert len(root) == 4


def test_tree_shift_json():
    code, out = run("tree", "--family", "shift", "--depth", "6", "--format", "json")
    assert code == 0 and json.loads(out)["counts"]["vertices"] == 7


def test_errors_are_single_line(capsys):
    cases = [
        (["scale", "--family", "matrix", "--p", "4", "--diag", "2,1"], "invalid-input"),
        (["scale", "--family", "matrix", "--p", "2", "--diag", "0,1"], "singular-matrix"),
        (["tidy", "--family", "shift", "--constraint", "0:{e,(12),(13)}"], "invalid-input"),
        (["tidy", "--family", "shift", "--constraint", "0:S3", "--constraint", "1:S3", "--constraint", "2:S3", "--cap", "1"], "step1-cap-exceeded"),
        (["tree", "--family", "matrix", "--p", "2", "--diag", "2,1/2", "--depth", "20", "--budget", "50"], "budget-exceeded"),
        (["frobnicate"], "usage"),
        (["suite", "--check", "C42"], "invalid-input"),
    ]
    for argv, code in cases:
        rc, out = run(*argv)
        err = capsys.readouterr().err
        assert rc == 2 and out == ""
        assert err.count("\n") == 1 and err.startswith(f"error[{code}]: ")


def test_budget_env(monkeypatch, capsys):
    monkeypatch.setenv("TIDYSCALE_VERTEX_BUDGET", "5")
    rc, _ = run("tree", "--family", "matrix", "--p", "2", "--diag", "2,1/2", "--depth", "2")
    assert rc == 2 and "budget-exceeded" in capsys.readouterr().err


def test_suite_subset_byte_stable():
    a = run("suite", "--check", "C1", "--cases", "3", "--json")
    b = run("suite", "--check", "C1", "--cases", "3", "--json")
    assert a == b and a[0] == 0
    assert json.loads(a[1])["passed"] is True


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "tidyscale", "scale", "--family", "matrix", "--p", "5", "--diag", "5,1/5"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and proc.stdout.splitlines()[0] == "25"


@pytest.mark.parametrize("fmt", ["dot", "json"])
def test_tree_output_byte_stable(fmt):
    argv = ("tree", "--family", "matrix", "--p", "3", "--diag", "3,1/3", "--format", fmt)
    assert run(*argv) == run(*argv)
