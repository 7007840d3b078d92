import json

import pytest

from chernforge.cli import main
from chernforge.cli.config import ConfigError, load_config

SMALL_GRID = {"m": 4, "n": 8}
SMALL_OPTS = {"start_h": 1}


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_bounds_command(capsys):
    code, out, _ = run(["bounds", "--m", "4"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert (rep["m0"], rep["q_min"], rep["schlafly_n_min"]) == (0, 10, 125)
    code, out, _ = run(["bounds", "--m", "8", "--k", "2"], capsys)
    assert json.loads(out)["schlafly_n_min"] == 2898


def test_verify_subset(capsys, tmp_path):
    code, out, _ = run(["verify", "--only", "quatlin", "--out", str(tmp_path)], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["pass"] and [s["suite"] for s in rep["suites"]] == ["quatlin"]
    assert (tmp_path / "verify.json").exists()


def test_verify_negative_control(capsys, tmp_path):
    cfg = write(tmp_path, "v.json", {
        "only": ["chernweil"], "fault": {"secondary_normalization": -0.5},
        "suites": {"chernweil": {"count": 1, "n": 10, "closed_count": 1}}})
    code, out, _ = run(["verify", "--config", cfg], capsys)
    checks = {c["name"]: c["pass"] for c in json.loads(out)["suites"][0]["checks"]}
    assert code == 1 and not checks["transgression"] and checks["additivity"]


def test_verify_unknown_suite(capsys):
    code, _, err = run(["verify", "--only", "nope"], capsys)
    assert code == 2 and "unknown suites" in err


def test_unknown_config_key(capsys, tmp_path):
    cfg = write(tmp_path, "c.json", {"grid": 8, "colour": "red"})
    code, _, err = run(["gen-tuple", "--config", cfg], capsys)
    assert code == 2 and "colour" in err


def test_flags_override_file(tmp_path):
    cfg = write(tmp_path, "c.json", {"seed": 3, "q": 12})
    job = load_config("gen-tuple", cfg, {"seed": 5, "q": None})
    assert job.get("seed") == 5 and job.get("q") == 12
    with pytest.raises(ConfigError):
        load_config("gen-tuple", None, {"q": "ten"})


def test_gen_tuple(capsys, tmp_path):
    code, out, _ = run(["gen-tuple", "--dim", "3", "--grid", "12", "--h", "2", "--out", str(tmp_path)], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["q"] == 6 and rep["certificate"]["pass"]
    assert rep["null_sum_relative"] < 1e-10
    assert json.loads((tmp_path / "tuple.json").read_text())


def test_decompose_job_and_reproducibility(capsys, tmp_path):
    job = {"grid": SMALL_GRID, "sigma": {"planted": {"q": 10, "h": 1, "seed": 0}}, "opts": SMALL_OPTS}
    cfg = write(tmp_path, "job.json", job)
    outs = []
    for name in ("a", "b"):
        code, out, _ = run(["decompose", "--config", cfg, "--out", str(tmp_path / name)], capsys)
        assert code == 0
        outs.append(tmp_path / name)
    rep = json.loads((outs[0] / "report.json").read_text())
    assert rep["converged"] and rep["relative_residual_sup"] < 1e-6
    for f in ("tuple.json", "history.csv", "connection.json", "report.json"):
        assert (outs[0] / f).exists()
    assert (outs[0] / "tuple.json").read_bytes() == (outs[1] / "tuple.json").read_bytes()
    assert (outs[0] / "history.csv").read_text().startswith("step,s,gn_iter")


def test_decompose_validation_errors(capsys, tmp_path):
    vol = {"m": 4, "degree": 4, "terms": [{"component": [0, 1, 2, 3],
                                           "harmonics": [{"k": [0, 0, 0, 0], "cos": 1.0, "sin": 0.0}]}]}
    cfg = write(tmp_path, "bad.json", {"grid": SMALL_GRID, "sigma": vol})
    code, _, err = run(["decompose", "--config", cfg], capsys)
    assert code == 2 and "NotExact" in err
    cfg = write(tmp_path, "q.json", {"grid": SMALL_GRID, "sigma": {"planted": {"h": 1}}, "q": 5})
    code, _, err = run(["decompose", "--config", cfg], capsys)
    assert code == 2 and "QTooSmall" in err


def test_realize_and_dbar_jobs(capsys, tmp_path):
    cfg = write(tmp_path, "r.json", {"grid": SMALL_GRID, "sigma": {"planted": {"h": 1, "seed": 2}},
                                     "opts": SMALL_OPTS})
    code, out, _ = run(["realize", "--config", cfg, "--out", str(tmp_path / "r")], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["kind"] == "realize" and rep["end_to_end_residual_sup"] is not None
    cfg = write(tmp_path, "d.json", {"grid": {"m": 3, "n": 12}, "beta": {"random": {"h": 1, "seed": 1}},
                                     "opts": SMALL_OPTS})
    code, out, _ = run(["dbar", "--config", cfg, "--out", str(tmp_path / "d")], capsys)
    assert code == 0 and json.loads(out)["converged"]
    assert (tmp_path / "d" / "phi.json").exists()


def test_lemma_commands(capsys):
    code, out, _ = run(["lemma", "--n", "3", "--q", "4"], capsys)
    rep = json.loads(out)["lemma_suite"]
    assert code == 0 and rep["passed"] and len(rep["results"]) == 4
    code, _, err = run(["lemma", "--n", "5"], capsys)
    assert code == 4 and "monte-carlo" in err
    code, out, _ = run(["lemma", "--mode", "monte-carlo", "--n", "4", "--q", "10", "--mc-trials", "50"], capsys)
    rep = json.loads(out)["codim_monte_carlo"]
    assert code == 0 and rep["fraction"] == 1.0 and rep["target_rank"] == 6


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "chernforge", "bounds", "--m", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["q_min"] == 6
