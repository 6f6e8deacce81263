import csv
import json
import subprocess
import sys

from gmmopt.cli import main
from gmmopt.problems import problem_names


def test_list_problems(tmp_path, capsys):
    assert main(["list-problems"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == ["name", "default_n", "known_fmin"]
    assert [r[0] for r in rows[1:]] == problem_names()
    out = tmp_path / "p.csv"
    assert main(["list-problems", "--out", str(out)]) == 0
    assert out.read_text().startswith("name,default_n,known_fmin\n")


def test_run_and_profile(tmp_path):
    out = tmp_path / "runs.csv"
    traces = tmp_path / "traces"
    code = main(["run", "--problems", "quartic,arwhead", "--n", "10", "--solvers", "gmm,lbfgs",
                 "--hk", "diag-bb", "--tol", "1e-5", "--max-iters", "500", "--monotone",
                 "--out", str(out), "--trace-dir", str(traces), "--jobs", "1"])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 4 and {r["solver"] for r in rows} == {"gmm", "lbfgs"}
    first = json.loads((traces / "arwhead_n10_gmm_r0.jsonl").read_text().splitlines()[0])
    assert first["k"] == 0 and first["beta"] == 0.0
    prof = tmp_path / "prof.csv"
    assert main(["profile", "--input", str(out), "--metric", "iters", "--out", str(prof)]) == 0
    assert prof.read_text().splitlines()[0] == "solver,tau,rho"


def test_run_failures_are_data(tmp_path):
    out = tmp_path / "runs.csv"
    assert main(["run", "--problems", "ext-rosenbrock", "--n", "10", "--solvers", "sd",
                 "--max-iters", "2", "--out", str(out)]) == 0
    assert "MaxIters" in out.read_text()


def test_plan_errors_exit_nonzero(tmp_path, capsys):
    assert main(["run", "--problems", "nope", "--out", str(tmp_path / "x.csv")]) != 0
    assert "nope" in capsys.readouterr().err
    assert main(["run", "--problems", "quartic", "--solvers", "newton", "--out", str(tmp_path / "x.csv")]) != 0
    assert main(["run", "--problems", "ext-rosenbrock", "--n", "3", "--out", str(tmp_path / "x.csv")]) != 0
    assert main(["profile", "--input", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "p.csv")]) != 0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "gmmopt", "list-problems"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("name,default_n,known_fmin")
