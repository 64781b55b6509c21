import csv
import io
import json
import subprocess
import sys

import pytest

from menuforge.cli import SWEEP_COLUMNS, parse_range, run, sweep_rows


def _run(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_solve_example_1_json():
    code, out = _run("solve", "--c", "1.26", "--b1", "1", "--b2", "1", "--output", "json")
    assert code == 0
    d = json.loads(out)
    assert d["schema_version"] == 1
    assert d["regime"] == "C"
    assert d["params"]["delta1"] == pytest.approx(20 / 63, abs=1e-9)


def test_solve_ratio_flags_equal_absolute():
    _, a = _run("solve", "--c-over-b2", "2", "--b1-over-b2", "1.2", "--b2", "2")
    _, b = _run("solve", "--c", "4", "--b1", "2.4", "--b2", "2")
    assert json.loads(a)["params"] == json.loads(b)["params"]


def test_solve_csv_columns():
    code, out = _run("solve", "--c", "2", "--b1", "1.2", "--output", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == SWEEP_COLUMNS and rows[1][2] == "D"


@pytest.mark.parametrize("argv", [
    ["solve", "--b1", "1"],
    ["solve", "--c", "1", "--c-over-b2", "1", "--b1", "1"],
    ["solve", "--c", "-1", "--b1", "1"],
    ["solve", "--c1", "0.4", "--b1", "1.2"],
    ["solve", "--c1", "0.9", "--c2", "0.2", "--b1", "1.2"],
    ["solve", "--c", "1", "--b1", "1", "--bogus"],
    ["sweep", "--b1-over-b2", "1:2", "--c-over-b2", "0:1:0.5"],
    ["certify", "--check", "nope"],
    ["oracle", "--c", "1", "--b1", "1", "--grid", "0.1"],
])
def test_bad_input_exits_1(argv, capsys):
    assert run(argv, io.StringIO()) == 1


def test_verify_round_trip(tmp_path):
    _, out = _run("solve", "--c", "1.5", "--b1", "1", "--b2", "1")
    f = tmp_path / "m.json"
    f.write_text(out)
    code, rep = _run("verify", "--input", str(f))
    direct_code, direct = _run("verify", "--c", "1.5", "--b1", "1")
    assert code == direct_code == 0
    assert json.loads(rep)["worst_margin"] == pytest.approx(json.loads(direct)["worst_margin"], abs=1e-15)


def test_verify_failure_exits_2(tmp_path):
    _, out = _run("solve", "--c", "2", "--b1", "1.2")
    d = json.loads(out)
    for it in d["menu"]:
        if it["q1"] == 1:
            it["price"] += 0.05
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(d))
    code, txt = _run("verify", "--input", str(f), "--output", "text")
    assert code == 2 and "FAIL" in txt


def test_sweep_regimes_and_determinism():
    code, out = _run("sweep", "--b1-over-b2", "1:2.2:0.2", "--c-over-b2", "0:12:0.1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 7 * 121
    assert {r["regime"] for r in rows} == {"A", "B", "C", "D", "Dp", "E", "Ep"}
    assert sweep_rows([1.2, 2.0], [0.5, 3.0], 1) == sweep_rows([1.2, 2.0], [0.5, 3.0], 2)


def test_workers_env_override(monkeypatch):
    monkeypatch.setenv("MENUFORGE_WORKERS", "2")
    code, a = _run("sweep", "--b1-over-b2", "1:1.4:0.2", "--c-over-b2", "0:3:1")
    monkeypatch.delenv("MENUFORGE_WORKERS")
    _, b = _run("sweep", "--b1-over-b2", "1:1.4:0.2", "--c-over-b2", "0:3:1", "--workers", "1")
    assert code == 0 and a == b


def test_parse_range():
    assert list(parse_range("0:1:0.25")) == [0, 0.25, 0.5, 0.75, 1.0]


def test_oracle_verb():
    code, out = _run("oracle", "--c", "1", "--b1", "1", "--grid", "0.25,0.1")
    d = json.loads(out)
    assert code == 0 and d["passed"] and d["regime"] == "A"
    code, out = _run("oracle", "--c", "1", "--b1", "1", "--grid", "0.25,0.1", "--top-k", "3", "--output", "csv")
    assert out.splitlines()[0] == "menu,revenue" and len(out.splitlines()) == 4


def test_dual_verb():
    code, out = _run("dual", "--example", "2")
    d = json.loads(out)
    assert code == 0 and d["gap"] <= 1e-4
    code, out = _run("dual", "--example", "1", "--output", "csv")
    assert out.startswith("measure,s,z1,z2,density")


def test_certify_verb():
    code, out = _run("certify", "--check", "c2-6-monotonicity", "--grid", "6", "--output", "text")
    assert code == 0 and out.startswith("PASS c2-6-monotonicity")
    code, out = _run("certify", "--grid", "4")
    assert code == 0 and json.loads(out)["passed"]


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "menuforge", "solve", "--c", "0", "--b1", "1.2", "--output", "text"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and "delta1" in p.stdout
