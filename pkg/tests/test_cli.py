import csv
import io
import json
import os
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reslab.cli_reports import UsageError, atomic_write, main, parse_complex


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_parse_complex_roundtrip(a, b):
    assert parse_complex(f"{a!r},{b!r}") == complex(a, b)


@pytest.mark.parametrize("bad", ["1,x", "", "1,2,3", "a"])
def test_parse_complex_rejects(bad):
    with pytest.raises(UsageError):
        parse_complex(bad)


def test_usage_errors_exit_2(capsys, tmp_path):
    assert run(["resolvent", "--z", "1,x"], capsys)[0] == 2
    assert run(["nope"], capsys)[0] == 2
    assert run(["spherical", "--lambda", "1", "--point", "0.4,-0.1"], capsys)[0] == 2
    cfg = tmp_path / "c.json"
    cfg.write_text('{"colour": 1}')
    code, _, err = run(["resolvent", "--z", "1,0.1", "--config", str(cfg)], capsys)
    assert code == 2 and "unknown config key" in err
    assert run(["resolvent", "--z", "0,-3.5"], capsys)[0] == 2
    path = tmp_path / "p.json"
    path.write_text("[[0.3, -0.2]]")
    assert run(["continue", "--path", str(path), "--start-sheet", "+,+"], capsys)[0] == 2
    assert run(["continue", "--path", str(path), "--start-sheet", "+,x"], capsys)[0] == 2


def test_verify_branch_json(capsys):
    code, out, err = run(["verify", "branch", "--seed", "3"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["passed"] and rep["suite"] == "branch"
    assert all({"name", "anchor", "residual", "tol", "passed"} <= set(c) for c in rep["checks"])
    assert "[PASS]" in err


def test_verify_csv_to_file(capsys, tmp_path):
    code, out, _ = run(["verify", "symbols", "--format", "csv", "--out", str(tmp_path) + os.sep], capsys)
    assert code == 0 and out == ""
    rows = list(csv.reader(open(tmp_path / "verify_symbols.csv")))
    assert rows[0][:3] == ["suite", "check", "residual"]
    assert not [p for p in os.listdir(tmp_path) if p.endswith(".tmp")]


def test_resolvent_outputs(capsys, tmp_path):
    code, out, _ = run(["resolvent", "--z", "1,-0.2"], capsys)
    d = json.loads(out)
    assert code == 0 and len(d["value"]) == 2 and d["err_estimate"] < 1e-8
    code, out, _ = run(["resolvent", "--z-grid", "0.5,1,2,-0.2,0.1,2"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 5 and rows[0] == ["re_z", "im_z", "re_R", "im_R"]


def test_spherical_command(capsys):
    code, out, _ = run(["spherical", "--lambda", "0,0,0.7,0.3", "--point", "0.4,-0.1"], capsys)
    d = json.loads(out)
    assert code == 0 and d["point"][0] == 0.4
    code, out, _ = run(["spherical", "--lambda", "0,0,0.7,0.3", "--point", "0,0"], capsys)
    assert json.loads(out)["value"] == [1.0, 0.0]


def test_continue_monodromy(capsys, tmp_path):
    path = tmp_path / "loop.json"
    path.write_text(json.dumps([[0.3, -0.2], [0.3, -0.8], [-0.3, -0.8], [-0.3, -0.2], [0.3, -0.2]]))
    code, out, _ = run(["continue", "--path", str(path), "--start-sheet", "+,+,+"], capsys)
    d = json.loads(out)
    assert code == 0 and d["end_sheet"] == "-,+,+"
    code, out, _ = run(["continue", "--path", str(path), "--start-sheet", "+,+,+", "--format", "csv",
                        "--with-resolvent"], capsys)
    header = out.splitlines()[0].split(",")
    assert header[-2:] == ["re_R", "im_R"]


def test_residues_and_scan(capsys):
    code, out, _ = run(["residues", "--n", "1", "--all-sheets", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 5
    assert rows[0][:4] == ["n", "eps", "re_extracted", "im_extracted"]
    assert run(["residues", "--n", "5"], capsys)[0] == 2
    code, out, _ = run(["scan"], capsys)
    assert code == 0 and json.loads(out)["clean"]


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"symbol": {"family": "gaussian", "beta": 2.0}, "order": 24}))
    code, out, _ = run(["resolvent", "--z", "1,0.1", "--config", str(cfg)], capsys)
    base = json.loads(run(["resolvent", "--z", "1,0.1"], capsys)[1])
    assert code == 0 and json.loads(out)["value"] != base["value"]


def test_atomic_write_replaces(tmp_path):
    target = tmp_path / "r.json"
    atomic_write(str(target), "one")
    atomic_write(str(target), "two")
    assert target.read_text() == "two"
    assert os.listdir(tmp_path) == ["r.json"]


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "reslab", "verify", "spherical"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["passed"]
