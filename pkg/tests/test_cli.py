import json
import subprocess
import sys

import pytest

import umbrella.cli as cli
from umbrella import SolverInconsistency
from umbrella.cli import _glue_coordinates, main

WORKED = {"ell": 3, "form": "ellipse_circle", "a": 1, "b": 2, "p": [[0, 0], [1, 0], [0, 1]]}
EXTENDED = {"ell": 4, "A": [[1, 2], [1, 1], [1, 1], [1, 1]], "p": [[0, 0], [1, 0], [0, 1], [1, 1]]}


@pytest.fixture
def spec_file(tmp_path):
    def write(obj, name="m.json"):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)
    return write


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_analyze(capsys, spec_file):
    code, pts = run(capsys, "analyze", "--map", spec_file(WORKED))
    assert code == 0 and len(pts) == 1
    assert pts[0]["x1"] == pytest.approx(2) and pts[0]["x2"] == pytest.approx(-1)
    assert pts[0]["levels"] == pytest.approx([6, 2, 8]) and pts[0]["rank"] == 1


def test_analyze_ell2(capsys, spec_file):
    code, out = run(capsys, "analyze", "--map", spec_file({"form": "ellipse_circle", "a": 1, "b": 2,
                                                             "p": [[0, 0], [1, 1]]}))
    assert code == 0 and out["kind"] == "rectangular_hyperbola" and out["conic"]["c11"] == -1


def test_classify(capsys, spec_file):
    code, out = run(capsys, "classify", "--map", spec_file(WORKED))
    assert code == 0 and out["class"] == "whitney_umbrella" and abs(out["det"]) > 1e-6
    code, out = run(capsys, "classify", "--map", spec_file(EXTENDED))
    assert code == 0 and out == {"class": "immersion"}


def test_oracle(capsys, spec_file):
    code, out = run(capsys, "oracle", "--map", spec_file(WORKED), "--box", "-5,-5,5,5", "--grid", "200")
    assert code == 0
    assert out["tangency_points"] == [pytest.approx([2, -1], abs=1e-7)]
    assert out["excluded_regions"] == 0 and len(out["objective_at_points"]) == 1


def test_experiment(capsys):
    code, out = run(capsys, "experiment", "--ell", "3", "--a", "1", "--b", "2", "--trials", "5",
                    "--seed", "42", "--box", "-2,-2,2,2")
    assert code == 0 and out["histogram"] == {"1": 5} and out["seed"] == 42 and out["crosscap_pass"] == 5


def test_experiment_keep_trials_is_json(capsys):
    code, out = run(capsys, "experiment", "--ell", "3", "--trials", "3", "--seed", "1", "--keep-trials",
                    "--oracle-every", "2")
    assert code == 0 and len(out["trials"]) == 3 and out["oracle_runs"] == 2


def test_figure(capsys, spec_file, tmp_path):
    out = tmp_path / "f.svg"
    code, _ = run(capsys, "figure", "--map", spec_file(WORKED), "--out", str(out))
    assert code == 0 and out.read_text().startswith("<svg")
    out2 = tmp_path / "g.svg"
    code, _ = run(capsys, "figure", "--map", spec_file(EXTENDED), "--probe", "2,-1", "--out", str(out2))
    assert code == 0 and out2.read_text().count("level-curve") == 4


@pytest.mark.parametrize("args", [
    ["figure", "--map", "{extended}", "--out", "{tmp}/x.svg"],
    ["analyze", "--map", "{zero}"],
    ["analyze", "--map", "{broken}"],
    ["analyze", "--map", "{tmp}/missing.json"],
    ["oracle", "--map", "{worked}", "--box", "1,1,0,0"],
    ["experiment", "--ell", "3", "--trials", "1", "--seed", "1", "--a", "2", "--b", "1"],
    ["figure", "--map", "{worked}", "--out", "{tmp}/no/such/dir/x.svg"],
])
def test_invalid_input_exit_code(capsys, spec_file, tmp_path, args):
    paths = {"extended": spec_file(EXTENDED, "e.json"), "worked": spec_file(WORKED, "w.json"),
             "zero": spec_file({"A": [[0, 1], [1, 1], [1, 1]], "p": [[0, 0], [1, 0], [0, 1]]}, "z.json"),
             "broken": spec_file("{not json", "b.json"), "tmp": str(tmp_path)}
    code = main([a.format(**paths) for a in args])
    assert code == 2
    assert capsys.readouterr().err.startswith("umbrella:")


def test_solver_inconsistency_exit_code(capsys, spec_file, monkeypatch):
    def boom(m, tol):
        raise SolverInconsistency("diverged", candidates=[(1.0, 2.0)])
    monkeypatch.setattr(cli, "solve_singular_points", boom)
    code, out = run(capsys, "analyze", "--map", spec_file(WORKED))
    assert code == 3 and out["error"] == "solver_inconsistency" and out["candidates"] == [[1.0, 2.0]]


def test_glue_coordinates():
    assert _glue_coordinates(["--box", "-5,-5,5,5", "--grid", "3"]) == ["--box=-5,-5,5,5", "--grid", "3"]
    assert _glue_coordinates(["--probe"]) == ["--probe"]


def test_module_entry_point(spec_file):
    proc = subprocess.run([sys.executable, "-m", "umbrella", "classify", "--map", spec_file(WORKED)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["class"] == "whitney_umbrella"
