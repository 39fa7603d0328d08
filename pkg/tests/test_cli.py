import json
import os
import subprocess
import sys

import pytest

from iblinf.cli import main
from iblinf.report import Report
from iblinf import tables
from iblinf.complexes import builtin_complex, complex_from_data
from iblinf.cyclic import dibl_ops


def run_cli(args, capsys):
    try:
        code = main(args)
    except SystemExit as e:
        code = e.code
    out = capsys.readouterr().out
    return code, out


def test_verify_builtin(capsys):
    code, out = run_cli(["verify", "--complex", "circle"], capsys)
    assert code == 0
    assert "overall: pass" in out


def test_verify_json_file(tmp_path, capsys):
    p = tmp_path / "cx.json"
    builtin_complex("dga4").save(str(p))
    code, out = run_cli(["verify", "--complex", str(p), "--format", "json"],
                        capsys)
    assert code == 0
    data = json.loads(out)
    assert data["ok"] is True


def test_verify_broken_pairing_fails(tmp_path, capsys):
    cx = complex_from_data(["a", "b"], [1, 2], 3,
                           [[0, 1], [1, 0]], [[0, 0], [1, 0]])
    p = tmp_path / "bad.json"
    cx.save(str(p))
    code, out = run_cli(["verify", "--complex", str(p)], capsys)
    assert code == 1
    assert "FAIL" in out


def test_check_structure(capsys):
    code, out = run_cli(["check-structure", "--complex", "circle",
                         "--max-sig", "5", "--max-word", "4"], capsys)
    assert code == 0


def test_check_structure_table_file(tmp_path, capsys):
    tab = dibl_ops(builtin_complex("circle"))
    path = tmp_path / "table.json"
    tables.save(tables.table_to_json(tab, max_weight=4), str(path))
    code, out = run_cli(["check-structure", "--table", str(path),
                         "--max-sig", "4", "--max-word", "3"], capsys)
    assert code == 0


def test_table_json_roundtrip(tmp_path):
    from iblinf.symbar import ewords
    tab = dibl_ops(builtin_complex("acyclic2"))
    data = tables.table_to_json(tab, max_weight=4)
    tab2 = tables.table_from_json(json.loads(json.dumps(data)))
    for sig in tab.sigs():
        op1 = tab.get(sig)
        op2 = tab2.get(sig)
        for w in ewords(tab.carrier, sig[0], 4):
            w2 = tuple(str(x) for x in w)
            got = {tuple(z): c for z, c in op2(w2).items()}
            want = {tuple(str(x) for x in z): c for z, c in op1(w).items()}
            # restrict to outputs representable at the truncation
            assert got == want


def test_check_morphism_files(tmp_path, capsys):
    from iblinf.transfer import hodge_split, transfer_morphism
    from iblinf.iblcheck import signatures
    cx = builtin_complex("acyclic2")
    sub = hodge_split(cx)
    mor = transfer_morphism(sub, signatures(4))
    ptab = dibl_ops(cx)
    qtab = dibl_ops(sub.bx)
    mp = tmp_path / "mor.json"
    sp = tmp_path / "src.json"
    tp = tmp_path / "dst.json"
    tables.save(tables.morphism_to_json(mor, max_weight=4), str(mp))
    tables.save(tables.table_to_json(ptab, max_weight=6), str(sp))
    tables.save(tables.table_to_json(qtab, max_weight=6), str(tp))
    code, out = run_cli(["check-morphism", "--morphism", str(mp),
                         "--source", str(sp), "--target", str(tp),
                         "--max-sig", "3", "--max-word", "3"], capsys)
    assert code == 0, out


def test_graphs_cli(tmp_path, capsys):
    dotdir = tmp_path / "dots"
    code, out = run_cli(["graphs", "--k", "1", "--l", "2", "--g", "0",
                         "--max-legs", "1", "--dot-dir", str(dotdir)],
                        capsys)
    assert code == 0
    data = json.loads(out)
    assert data["count"] >= 1
    files = sorted(os.listdir(dotdir))
    assert files
    text = open(dotdir / files[0]).read()
    assert text.startswith("graph ribbon")
    # byte-identical re-export
    code, out2 = run_cli(["graphs", "--k", "1", "--l", "2", "--g", "0",
                          "--max-legs", "1", "--dot-dir", str(dotdir)],
                         capsys)
    assert open(dotdir / files[0]).read() == text


def test_transfer_cli(tmp_path, capsys):
    code, out = run_cli(["transfer", "--complex", "acyclic2",
                         "--max-sig", "4", "--max-word", "4",
                         "--table-out", str(tmp_path / "f.json")], capsys)
    assert code == 0
    data = json.loads(open(tmp_path / "f.json").read())
    assert data["kind"] == "morphism"


def test_mc_check_cli(capsys):
    code, out = run_cli(["mc-check", "--complex", "circle",
                         "--product", "circle", "--max-word", "5"], capsys)
    assert code == 0, out


def test_twist_cli(capsys):
    code, out = run_cli(["twist", "--complex", "circle",
                         "--product", "circle", "--max-sig", "3",
                         "--max-word", "5"], capsys)
    assert code == 0, out


def test_cyclic_cohomology_cli(capsys):
    code, out = run_cli(["cyclic-cohomology", "--complex", "acyclic2",
                         "--max-word", "5", "--format", "json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert "dimension_table" in data["config"]


def test_weyl_check_cli(tmp_path, capsys):
    ham = {
        "kind": "hamiltonian",
        "d": 0,
        "indices": [{"name": "x", "qdeg": -1, "kappa": "1"},
                    {"name": "y", "qdeg": -1, "kappa": "1"}],
        "terms": [{"q": ["x", "y"], "p": ["x"], "hbar": -1, "c": "1"}],
    }
    path = tmp_path / "h.json"
    tables.save(ham, str(path))
    code, out = run_cli(["weyl-check", "--hamiltonian", str(path),
                         "--max-sig", "4"], capsys)
    assert code == 0, out
    assert "master-equation" in out


def test_pipeline_deterministic_json(tmp_path, capsys):
    outs = []
    for _ in range(2):
        code, out = run_cli(["pipeline", "--complex", "circle",
                             "--max-sig", "4", "--max-word", "4",
                             "--format", "json"], capsys)
        assert code == 0
        data = json.loads(out)
        data.pop("timings", None)
        outs.append(json.dumps(data, sort_keys=True))
    assert outs[0] == outs[1]


def test_pipeline_skips_after_broken_verify(tmp_path, capsys):
    cx = complex_from_data(["a", "b"], [1, 2], 3,
                           [[0, 1], [1, 0]], [[0, 0], [1, 0]])
    p = tmp_path / "bad.json"
    cx.save(str(p))
    code, out = run_cli(["pipeline", "--complex", str(p)], capsys)
    assert code == 1
    assert "skip" in out
    assert "transfer" in out


def test_worker_env_var(tmp_path):
    env = dict(os.environ)
    env["IBLINF_WORKERS"] = "2"
    proc = subprocess.run(
        [sys.executable, "-m", "iblinf.cli", "check-structure",
         "--complex", "circle", "--max-sig", "4", "--max-word", "3"],
        capture_output=True, text=True, env=env)
    assert proc.returncode == 0, proc.stderr
    assert "overall: pass" in proc.stdout


def test_report_parse_roundtrip():
    r = Report("demo", {"a": 1})
    r.add("x", "pass")
    r.add("y", "fail", "boom")
    data = Report.parse(r.dumps())
    assert data["ok"] is False
    assert data["checks"][1]["detail"] == "boom"
