import csv
import io
import json
import subprocess
import sys

import pytest

from psi_point.cli import run_cli


@pytest.fixture(autouse=True)
def restore_parallelism():
    from psi_point import kernel

    before = kernel.get_parallelism()
    yield
    kernel.set_parallelism(before)


def run(capsys, *argv):
    code = run_cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_npoint_json(capsys):
    code, out, _ = run(capsys, "npoint", "--n", "3", "--order", "6", "--format", "json", "--parallelism", "1")
    assert code == 0
    doc = json.loads(out)
    assert (doc["n"], doc["order"]) == (3, 6)
    values = {(e["g"], tuple(e["d"])): e["value"] for e in doc["entries"]}
    assert values[(0, (0, 0, 0))] == "1"
    assert values[(1, (1, 1, 1))] == "1/12"
    assert values[(2, (0, 0, 6))] == "1/1152"
    keys = [(e["g"], e["d"]) for e in doc["entries"]]
    assert keys == sorted(keys)


def test_npoint_csv(capsys):
    code, out, _ = run(capsys, "npoint", "--n", "2", "--order", "5", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["g", "d1", "d2", "value"]
    assert ["1", "1", "1", "1/24"] in rows
    assert ["2", "4", "1", "1/384"] in rows


def test_npoint_with_oracle_check(capsys):
    code, out, _ = run(capsys, "npoint", "--n", "3", "--order", "3", "--check", "oracle")
    assert code == 0
    assert json.loads(out)["check"] == "ok"


def test_intersect_with_check(capsys):
    code, out, _ = run(capsys, "intersect", "--g", "2", "--d", "4", "--check", "oracle")
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == "1/1152" and doc["check"] == "ok" and doc["oracle"] == "1/1152"


def test_intersect_csv(capsys):
    code, out, _ = run(capsys, "intersect", "--g", "1", "--d", "1,1,1", "--format", "csv")
    assert code == 0
    assert out == "g,d1,d2,d3,value\n1,1,1,1,1/12\n"


def test_dr(capsys):
    code, out, _ = run(capsys, "dr", "--a", "3,-3", "--d", "1,0")
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == "1/3" and doc["g"] == 1


def test_dr_unbalanced_is_usage_error(capsys):
    code, _, err = run(capsys, "dr", "--a=3,-2", "--d", "1,0")
    assert code == 1
    assert "sum to zero" in err


def test_drpush_reports_both_routes(capsys):
    code, out, _ = run(capsys, "drpush", "--a", "2,-1,1", "--b=-1,-1", "--d", "1,1,0")
    assert code == 0
    doc = json.loads(out)
    assert doc["series_value"] == doc["direct_value"]
    assert doc["check"] == "ok" and doc["g"] == 0


def test_drpush_off_dimension(capsys):
    code, out, _ = run(capsys, "drpush", "--a", "1,1,-2", "--b", "0", "--d", "1,1,0")
    assert code == 0
    doc = json.loads(out)
    assert doc["direct_value"] is None and doc["series_value"] == "0"


def test_pn_numeric_and_symbolic(capsys):
    code, out, _ = run(capsys, "pn", "--a=2,1", "--order", "2")
    assert code == 0
    entries = {tuple(e["d"]): e["value"] for e in json.loads(out)["entries"]}
    assert entries[(1, 1)] == "-1/6"
    code, out, _ = run(capsys, "pn", "--n", "2", "--order", "2")
    assert code == 0
    entries = {tuple(e["d"]): e["value"] for e in json.loads(out)["entries"]}
    assert entries[(2, 0)] == "1/24*a2^2"


def test_pn_needs_a_or_n(capsys):
    code, _, _ = run(capsys, "pn", "--order", "2")
    assert code == 1


def test_selftest_quick(capsys):
    code, out, err = run(capsys, "selftest", "--level", "quick")
    assert code == 0
    doc = json.loads(out)
    assert doc["failed"] == 0 and doc["passed"] == len(doc["checks"]) > 0
    assert "PASS" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["npoint", "--n", "x", "--order", "3"],
        ["npoint", "--n", "0", "--order", "3"],
        ["intersect", "--g", "1", "--d=-1,2"],
        ["drpush", "--a", "1,1", "--b", "1", "--d", "0,0"],
        ["npoint", "--n", "2", "--order", "2", "--parallelism", "-1"],
    ],
)
def test_usage_errors_exit_one(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert out == "" and "error" in err


def test_out_file(tmp_path, capsys):
    path = tmp_path / "f.json"
    code, out, _ = run(capsys, "intersect", "--g", "1", "--d", "1", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["value"] == "1/24"


def test_env_parallelism(monkeypatch, capsys):
    from psi_point import kernel

    monkeypatch.setenv("PSI_POINT_PARALLELISM", "1")
    assert run(capsys, "intersect", "--g", "1", "--d", "1")[0] == 0
    assert kernel.get_parallelism() == 1
    monkeypatch.setenv("PSI_POINT_PARALLELISM", "many")
    assert run(capsys, "intersect", "--g", "1", "--d", "1")[0] == 1


def test_output_is_byte_stable(capsys):
    from psi_point import clear_caches

    argv = ["npoint", "--n", "4", "--order", "5"]
    _, first, _ = run(capsys, *argv, "--parallelism", "1")
    clear_caches()
    _, second, _ = run(capsys, *argv, "--parallelism", "2")
    assert first == second


def test_invariant_failure_exits_two(monkeypatch, capsys):
    from psi_point import cli
    from psi_point.errors import NonExactDivision

    def broken(*_):
        raise NonExactDivision("remainder 1/7")

    monkeypatch.setattr(cli, "intersection_number", broken)
    code, _, err = run(capsys, "intersect", "--g", "1", "--d", "1")
    assert code == 2 and "consistency" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "psi_point", "intersect", "--g", "0", "--d", "0,0,0"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"] == "1"
