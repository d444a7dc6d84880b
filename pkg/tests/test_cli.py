from __future__ import annotations

import io
import json
import subprocess
import sys
from contextlib import redirect_stdout
from pathlib import Path

import pytest

from fillvol.cli import main, parse_complex, parse_cycle

FIXTURES = Path(__file__).parent / "fixtures"


def run(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def test_check_builtin():
    code, out = run("check", "--complex", "builtin:cyclic:k=7")
    assert code == 0
    assert json.loads(out)["ranks"] == [1, 1, 1]


def test_check_corrupted_fixture_names_cell():
    code, out = run("check", "--complex", str(FIXTURES / "corrupted_cyclic3.json"))
    assert code == 1
    assert "b2" in json.loads(out)["cell"]


def test_check_missing_file():
    assert run("check", "--complex", "/nonexistent/complex.json")[0] == 3


def test_repro_fig1():
    code, out = run("repro", "fig1", "--k", "7")
    graphs = json.loads(out)["graphs"]
    assert [g["class"] for g in graphs[:3]] == ["edgeless", "cycle", "complete"]
    assert [g["edges"] for g in graphs[:3]] == [0, 7, 21]


def test_repro_z2():
    code, out = run("repro", "z2-nonfinite", "--nmax", "2")
    assert code == 0
    assert "Z,2,1,8,4,exact" in out.splitlines()
    assert "Q,2,1/2,4,2,exact" in out.splitlines()


def test_repro_cyclic_fv():
    code, out = run("repro", "cyclic-fv", "--k", "2", "--p", "2", "--lmax", "2")
    assert code == 0
    assert out.splitlines()[-1] == "2,1,exact"


def test_fv_zero_cycle():
    code, out = run("fv", "--complex", "builtin:z2", "--cycle", '{"degree": 1, "terms": []}')
    assert code == 0
    assert json.loads(out)["value"] == "0"


def test_fv_solvers_agree():
    values = []
    for solver, extra in (("exact", []), ("thicken", []), ("oracle", ["--box", "4", "--window-radius", "3"])):
        code, out = run("fv", "--complex", "builtin:z2", "--cycle", "commutator:2", "--solver", solver, *extra)
        assert code == 0
        values.append(json.loads(out)["value"])
    assert values == ["4", "4", "4"]


def test_fv_rational_and_weighted():
    code, out = run("fv", "--complex", "builtin:z2:ring=Q", "--cycle", "commutator:3:1/3")
    assert json.loads(out)["value"] == "3"
    code, out = run("fv", "--complex", "builtin:z2", "--cycle", "boundary:2:f@1", "--norm", "weighted")
    assert json.loads(out)["value"] == "2"


def test_fv_not_a_boundary():
    assert run("fv", "--complex", "builtin:cyclic:k=3", "--cycle", '{"degree": 0, "terms": [["b0", [], 1]]}')[0] == 1


def test_fv_table_tiny_budget_is_partial():
    code, out = run("fv-table", "--complex", "builtin:cyclic:k=3,ring=F2", "--degree", "2", "--lmax", "6",
                    "--node-cap", "1")
    assert code == 2
    assert out.startswith("l,value,status")
    assert "partial" in out


def test_fv_table_json_and_file(tmp_path):
    target = tmp_path / "t.csv"
    code, _ = run("--out", str(target), "fv-table", "--complex", "builtin:cyclic:k=2,ring=F2", "--degree", "2",
                  "--lmax", "3")
    assert code == 0
    assert target.read_text().splitlines()[3] == "2,1,exact"
    code, out = run("fv-table", "--complex", "builtin:cyclic:k=2,ring=F2", "--degree", "2", "--lmax", "3",
                    "--format", "json")
    assert json.loads(out)["entries"][2]["value"] == "1"


def test_graph_degree_zero_is_edgeless():
    code, out = run("graph", "--complex", "builtin:cyclic:k=7", "--degree", "0")
    data = json.loads(out)
    assert data["summary"]["edges"] == 0
    assert all(v == [] for v in data["adjacency"].values())


def test_thicken_csv():
    code, out = run("thicken", "--complex", "builtin:cyclic:k=7", "--degree", "0", "--cells", "b0", "--k", "2")
    lines = out.splitlines()
    assert lines[0] == "step,n0,n1,n2"
    assert lines[-2] == "2,7,7,7"


def test_qi_verify(tmp_path):
    mp = tmp_path / "map.json"
    mp.write_text(json.dumps({"K": 3, "f": "identity", "h": "identity"}))
    code, out = run("qi-verify", "--source", "builtin:cyclic-presentation:k=6,ring=F2",
                    "--target", "builtin:z6-two-generator:ring=F2", "--map", str(mp), "--n", "2")
    assert code == 0
    report = json.loads(out)
    assert report["bounds"] == "pass"
    assert report["f"]["degrees"][0]["D"] == "1"


def test_qi_verify_explicit_tables(tmp_path):
    mp = tmp_path / "map.json"
    table = [[[g], [g]] for g in range(4)]
    mp.write_text(json.dumps({"K": 1, "f": table, "h": table}))
    code, out = run("qi-verify", "--source", "builtin:cyclic-presentation:k=4,ring=F2",
                    "--target", "builtin:cyclic-presentation:k=4,ring=F2", "--map", str(mp), "--n", "1")
    assert code == 0


def test_export_builtin_round_trip(tmp_path):
    target = tmp_path / "z2.json"
    assert run("--out", str(target), "export-builtin", "z2")[0] == 0
    assert parse_complex(str(target)) == parse_complex("builtin:z2")


def test_deterministic_output():
    a = run("repro", "z2-nonfinite", "--nmax", "2")[1]
    b = run("repro", "z2-nonfinite", "--nmax", "2")[1]
    assert a == b


def test_input_errors():
    assert run("fv", "--complex", "builtin:nope", "--cycle", "commutator:1")[0] == 3
    assert run("fv", "--complex", "builtin:z2", "--cycle", "{not json")[0] == 3
    assert run("fv-table", "--complex", "builtin:z2", "--degree", "2", "--lmax", "-1")[0] == 3


def test_parse_cycle_forms():
    cx = parse_complex("builtin:z2")
    assert cx.norm(parse_cycle(cx, "commutator:2")) == 8
    assert cx.norm(parse_cycle(cx, "boundary:2:f")) == 4


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fillvol", "repro", "fig1", "--k", "3", "--degrees", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["k"] == 3


def test_out_after_subcommand(tmp_path):
    path = tmp_path / "tripod.json"
    assert main(["export-builtin", "tripod", "-o", str(path)]) == 0
    assert json.loads(path.read_text())["degrees"]


def test_usage_error_is_input_error():
    with pytest.raises(SystemExit) as exc:
        main(["fv", "--bogus"])
    assert exc.value.code == 3
