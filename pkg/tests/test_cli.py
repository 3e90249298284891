import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from ncclark import builtins as B
from ncclark.cli import main

SCHEMA = json.loads(resources.files("ncclark").joinpath("schema/report.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    return code, rep


def test_quasiextreme_vacuum(capsys):
    code, rep = report(capsys, "quasiextreme", "--builtin", "zero", "--N", "4")
    assert code == 0
    assert [c["distanceSq"] for c in rep["data"]["curve"]] == [1.0] * 4
    assert rep["verdict"] == "not quasi-extreme"


def test_boundary_coordinate(capsys):
    code, rep = report(capsys, "boundary", "--builtin", "coordinate", "--zeta", "1,0", "--alpha", "1")
    assert code == 0
    eig = rep["data"]["0"]["eigen"]["1+0i"]
    assert eig["L"] == pytest.approx(1, abs=1e-6)
    assert eig["residual"] <= 1e-8


def test_boundary_no_eigenvalue(capsys):
    code, rep = report(capsys, "boundary", "--builtin", "coordinate", "--zeta", "0,1")
    assert code == 0 and rep["verdict"] == "no eigenvalue predicted"


def test_boundary_inconclusive(tmp_path, capsys):
    path = tmp_path / "b.json"
    path.write_text(json.dumps(B.two_point(N=4).series.to_json()))
    code, rep = report(capsys, "boundary", "--multiplier", str(path), "--zeta", "1,0")
    assert code == 2 and rep["status"] == "inconclusive"


@pytest.mark.parametrize(
    "argv",
    [
        ["gram", "--builtin", "cuntz:0.6,0.8", "--N", "4"],
        ["gns", "--builtin", "coordinate", "--N", "4"],
        ["extend", "--builtin", "cuntz:0.6,0.8", "--N", "3", "--max-len", "4"],
        ["fantappie", "--builtin", "two-point", "--alpha", "1", "--alpha", "1j", "--points", "6"],
        ["gleason", "--builtin", "cuntz:0.6,0.8"],
        ["clark", "--builtin", "one-var:0,0,1", "--d", "1", "--points", "6"],
        ["disintegrate", "--builtin", "product-nonextreme"],
        ["resolvent", "--builtin", "zero", "--radius", "0.6"],
        ["oracle", "--d", "2", "--max-len", "5", "--max-degree", "2"],
        ["moments", "--builtin", "two-point", "--alpha", "-1", "--N", "3"],
        ["suite", "--builtin", "coordinate", "--N", "4"],
    ],
)
def test_subcommands_ok(capsys, argv):
    code, rep = report(capsys, *argv)
    assert code == 0, rep


def test_extend_non_quasi_extreme_fails(capsys):
    code, rep = report(capsys, "extend", "--builtin", "product-nonextreme", "--N", "3")
    assert code == 1 and rep["errors"][0]["type"] == "PreconditionError"


@pytest.mark.xfail(strict=True, reason="two-point state is not quasi-extreme at finite degree; see ledger")
def test_suite_two_point(capsys):
    code, _ = report(capsys, "suite", "--builtin", "two-point", "--N", "5")
    assert code == 0


def test_suite_two_point_reports_residuals(capsys):
    code, rep = report(capsys, "suite", "--builtin", "two-point", "--N", "5")
    assert code == 1
    assert rep["residuals"]["quasiextreme.minDistanceSq"]["value"] == pytest.approx(0.13242212848799481)
    assert rep["residuals"]["fantappie.unitarity[1+0i]"]["pass"]


@pytest.mark.parametrize(
    "argv",
    [
        ["gram", "--builtin", "nope"],
        ["gram"],
        ["gram", "--builtin", "zero", "--frobnicate"],
        ["clark", "--builtin", "coordinate", "--alpha", "0.5"],
        ["boundary", "--builtin", "coordinate", "--zeta", "1,1"],
        ["gram", "--builtin", "zero", "--N", "0"],
        ["gleason", "--builtin", "zero", "--format", "csv"],
        [],
    ],
)
def test_errors_exit_one(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == ""
    payload = json.loads(err)
    assert payload["schemaVersion"] == 1 and payload["message"]


def test_missing_file(capsys):
    code, _, err = run(capsys, "gram", "--multiplier", "/nonexistent.json")
    assert code == 1 and "not found" in json.loads(err)["message"]


def test_csv_exports(capsys, tmp_path):
    code, out, _ = run(capsys, "quasiextreme", "--builtin", "two-point", "--N", "3", "--format", "csv")
    assert out.splitlines() == ["N,distanceSq", "1,0.5", "2,0.25", "3,0.1875"]
    out_path = tmp_path / "sched.csv"
    main(["boundary", "--builtin", "coordinate", "--zeta", "0,1", "--format", "csv", "-o", str(out_path)])
    lines = out_path.read_text().splitlines()
    assert lines[0] == "zetaIndex,radius,value,tailBound" and len(lines) == 21


def test_deterministic(capsys):
    a = run(capsys, "gleason", "--builtin", "cuntz:0.6,0.8j", "--seed", "3")[1]
    b = run(capsys, "gleason", "--builtin", "cuntz:0.6,0.8j", "--seed", "3")[1]
    assert a == b


def test_help_lists_grammar(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0 and "product-nonextreme" in out and "exit codes" in out


def test_entry_point():
    out = subprocess.run([sys.executable, "-m", "ncclark.cli", "oracle", "--max-len", "4", "--max-degree", "2"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["check"] == "oracle"
