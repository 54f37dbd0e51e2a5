import json
from pathlib import Path

import pytest

from pvcoh.cli import main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_generate(capsys):
    code, out = run_json(capsys, "generate", "--points", "50")
    assert code == 0 and len(out["letters"]) == 49
    code, text = run(capsys, "generate", "--points", "20", "--format", "text")
    assert code == 0 and set(text.strip()) <= {"a", "b"}


def test_output_deterministic(capsys):
    a = run(capsys, "approximants", "--points", "800", "--levels", "3")
    b = run(capsys, "approximants", "--points", "800", "--levels", "3")
    assert a == b and a[0] == 0


def test_approximants_dot(capsys):
    code, out = run(capsys, "approximants", "--points", "800", "--levels", "2", "--format", "dot")
    assert code == 0 and out.lstrip().startswith("digraph")


def test_cohomology_of_complex(capsys):
    code, out = run_json(capsys, "cohomology", "--input", str(DATA / "projective_plane.json"))
    assert code == 0
    assert out["simplicial"]["2"] == {"rank": 0, "torsion": [2]}


def test_cohomology_of_tiling(capsys):
    code, out = run_json(capsys, "cohomology", "--alpha", "silver", "--points", "2000", "--levels", "3")
    assert code == 0
    assert out["limit"]["1"]["group"] == {"rank": 2, "torsion": []}


def test_pv(capsys, tmp_path):
    target = tmp_path / "pv.json"
    code, out = run(capsys, "pv", "--levels", "3", "--points", "2000", "--output", str(target))
    assert code == 0 and out == ""
    res = json.loads(target.read_text())
    assert res["limit"]["1"] == {"group": {"rank": 2, "torsion": []}, "status": "Stabilized"}
    assert all(r["ok"] for r in res["certificates"]["theta_relations"])


def test_cantor_circle(capsys, tmp_path):
    fs = tmp_path / "f.json"
    fs.write_text(json.dumps([{"terms": [[1, 0, 1]], "constant": 0}, {"constant": 1}]))
    code, out = run_json(capsys, "cantor-circle", "--input", str(fs))
    assert code == 0
    assert [f["normal_form"] for f in out["normal_forms"]] == [[1, 0], [0, 1]]
    assert out["h1_rank"] == 2


def test_koszul_point(capsys):
    code, out = run_json(capsys, "koszul", "--system", str(DATA / "point_system.json"), "--d", "2")
    assert code == 0
    levels = out["cohomology"]["levels"][-1]
    assert [levels[k]["rank"] for k in "012"] == [1, 2, 1]


def test_koszul_tiling(capsys):
    code, out = run_json(capsys, "koszul", "--points", "1500", "--resolution", "3")
    assert code == 0
    assert out["cohomology"]["limit"]["1"]["group"]["rank"] == 2


def test_ahss_complex(capsys):
    code, out = run_json(capsys, "ahss", "--input", str(DATA / "torus.json"))
    assert code == 0
    assert out["K"] == {"K^0": {"rank": 2, "torsion": []}, "K^1": {"rank": 2, "torsion": []}}
    assert out["pages"][0]["page"] == 1


def test_ahss_torsion(capsys):
    code, out = run_json(capsys, "ahss", "--input", str(DATA / "projective_plane.json"))
    assert code == 0 and out["K"] is None


def test_verify(capsys):
    code, out = run_json(capsys, "verify", "--points", "2000", "--levels", "3")
    assert code == 0 and out["passed"]


@pytest.mark.parametrize("argv", [
    ["generate", "--alpha", "1,0,2,1"],
    ["generate", "--alpha", "nonsense"],
    ["generate", "--points", "1"],
    ["cohomology", "--input", "/no/such/file.json"],
    ["approximants", "--levels", "0"],
])
def test_errors(capsys, argv):
    code, out = run_json(capsys, *argv)
    assert code == 2
    assert set(out["error"]) == {"code", "message"}


def test_bad_threads(capsys, monkeypatch):
    monkeypatch.setenv("PVCOH_THREADS", "zero")
    code, out = run_json(capsys, "generate", "--points", "10")
    assert code == 2 and "PVCOH_THREADS" in out["error"]["message"]
