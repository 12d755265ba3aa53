import io
import json
import subprocess
import sys

import pytest

from surftri.cli import run
from surftri.genlab import k7_torus, torus_grid
from surftri.mapio import parse_map, serialize_map


def call(argv, stdin="", monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    if monkeypatch is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def record(text):
    lines = text[text.index("record "):].splitlines()
    vals = {}
    for line in lines[1:]:
        if line == "end":
            break
        k, _, v = line.partition(" ")
        vals[k] = v
    return vals


def test_widths():
    code, out, _ = call(["widths", "2"])
    assert code == 0
    rec = record(out)
    assert rec["gamma(2)"] == "29" and rec["phi(2,0)"] == "29" and rec["phi(2,3)"] == "161"


def test_gen_round_trip_through_validate(monkeypatch):
    code, out, _ = call(["gen", "torus-grid", "4", "4"])
    assert code == 0
    m = parse_map(out)
    assert m == torus_grid(4, 4)
    code, out2, _ = call(["validate"], out, monkeypatch)
    assert code == 0 and parse_map(out2) == m


def test_find_then_verify(monkeypatch):
    _, grid, _ = call(["gen", "torus-grid", "4", "4"])
    code, found, _ = call(["find-span", "--surface", "torus"], grid, monkeypatch)
    assert code == 0
    code, verified, _ = call(["verify-span"], found, monkeypatch)
    rec = record(verified)
    assert code == 0 and rec["verdict"] == "accept" and rec["holes"] == "2"


def test_verify_rejects(monkeypatch):
    m = k7_torus()
    text = serialize_map(m) + "patch\n" + "".join(f"{u} {v}\n" for u, v in m.edges) + "holes 0\n"
    code, out, _ = call(["verify-span"], text, monkeypatch)
    assert code == 2 and record(out)["verdict"] == "reject"


def test_certify_pipeline(monkeypatch):
    _, k7, _ = call(["gen", "fixture", "k7"])
    _, sub, _ = call(["subdivide"], k7, monkeypatch)
    code, out, _ = call(["certify-no-span", "--gprime", "1"], sub, monkeypatch)
    assert code == 0 and record(out)["verdict"] == "impossible"


def test_oracle_not_found_exit(monkeypatch):
    _, k7, _ = call(["gen", "fixture", "k7"])
    _, sub, _ = call(["subdivide"], k7, monkeypatch)
    code, out, _ = call(["oracle", "--holes", "1"], sub, monkeypatch)
    assert code == 2 and record(out)["verdict"] == "not-found"


def test_usage_errors_exit_one(monkeypatch):
    assert call(["nope"])[0] == 1
    assert call(["widths"])[0] == 1
    assert call(["gen", "torus-grid", "2", "5"])[0] == 1
    assert call(["gen", "fixture", "k9"])[0] == 1
    assert call(["genus", "/nonexistent/file"])[0] == 1
    code, _, err = call(["genus"], "surfacemap 1\nvertices 2\nrot 0: 1\n", monkeypatch)
    assert code == 1 and "line 3" in err


def test_machine_mode_is_canonical_json(monkeypatch):
    text = serialize_map(k7_torus())
    code, out, _ = call(["facewidth", "--machine"], text, monkeypatch)
    rec = json.loads(out)
    assert code == 0 and rec["values"]["facewidth"] == 3
    assert out.strip() == json.dumps(rec, sort_keys=True, separators=(",", ":"))


@pytest.mark.parametrize("argv, key, value", [
    (["genus"], "euler_genus", "2"),
    (["classify-cycle", "--cycle", "0 1 2"], "class", "nonseparating"),
    (["homotopic", "--cycle", "0 1 2", "--other", "3 4 5"], "homotopic", "true"),
    (["cut", "--cycle", "0 1 2"], "pieces", "1"),
])
def test_topology_commands(monkeypatch, argv, key, value):
    code, out, _ = call(argv, serialize_map(torus_grid(3, 3)), monkeypatch)
    assert code == 0 and record(out)[key] == value


def test_connect_sum(tmp_path):
    a, b = tmp_path / "a.map", tmp_path / "b.map"
    a.write_text(serialize_map(torus_grid(3, 3)))
    b.write_text(serialize_map(k7_torus()))
    code, out, _ = call(["connect-sum", str(a), str(b)])
    assert code == 0 and record(out)["euler_genus"] == "4"


def test_gen_refine_reads_stdin(monkeypatch):
    code, out, _ = call(["gen", "refine", "5", "3"], serialize_map(k7_torus()), monkeypatch)
    assert code == 0 and parse_map(out).vertex_count == 12


def test_shell_pipeline():
    cmd = [sys.executable, "-m", "surftri.cli"]
    gen = subprocess.run(cmd + ["gen", "torus-grid", "4", "4"], capture_output=True, text=True)
    find = subprocess.run(cmd + ["find-span", "--surface", "torus"], input=gen.stdout,
                          capture_output=True, text=True)
    ver = subprocess.run(cmd + ["verify-span"], input=find.stdout, capture_output=True, text=True)
    assert ver.returncode == 0
    assert record(ver.stdout)["verdict"] == "accept"
