import csv
import json
import subprocess
import sys

import pytest

from scuq.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main
from scuq.experiments import (EXPERIMENTS, apply_overrides, load_config, resolve_threads,
                              shipped_config_path, validate_config)


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def small_scalar(experiment="ex1-uniform", **changes):
    cfg = load_config(experiment)
    cfg.update({"N": [7, 10, 16], "M": 20_000}, **changes)
    return cfg


def small_pde(experiment, **changes):
    cfg = load_config(experiment)
    solver = dict(cfg["solver"])
    if experiment == "ex4-swe":
        solver.update(dx=0.02, T=0.2)
        cfg["N"] = [8]
    else:
        solver.update(dx=0.05, T=0.05)
        cfg["N"] = [9]
    cfg.update({"M": 2000, "solver": solver, "threads": 1}, **changes)
    return cfg


def tree(root):
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


# ---------------------------------------------------------------- validate


@pytest.mark.parametrize("experiment", EXPERIMENTS)
def test_shipped_configs_validate(experiment, capsys):
    assert validate_config(load_config(experiment)) == []
    assert main(["validate", str(shipped_config_path(experiment))]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "ok"


def test_negative_m_names_the_field(tmp_path, capsys):
    cfg = load_config("ex1-uniform")
    cfg["M"] = -5
    assert main(["validate", str(write_config(tmp_path, cfg))]) == EXIT_USAGE
    out = capsys.readouterr().out
    assert out.startswith("M:")


def test_cweno_stencil_minimum_is_a_violation():
    cfg = load_config("ex4-swe")
    cfg["N"] = [6]
    problems = validate_config(cfg)
    assert any(p.startswith("N:") and "cweno" in p for p in problems)


@pytest.mark.parametrize("change,field", [
    ({"methods": []}, "methods"),
    ({"methods": ["gpc", "gpc"]}, "methods"),
    ({"methods": ["kriging"]}, "methods"),
    ({"N": [12, 8]}, "N"),
    ({"N": [8, 0]}, "N"),
    ({"seed": -1}, "seed"),
    ({"experiment": "ex5"}, "experiment"),
    ({"law": {"kind": "beta"}}, "law"),
    ({"law": {"kind": "normal", "sigma": -1}}, "law"),
    ({"convention": "other"}, "convention"),
    ({"overflow": "drop"}, "overflow"),
    ({"max_bins": 0}, "max_bins"),
    ({"M": 1.5}, "M"),
    ({"M": True}, "M"),
])
def test_scalar_violations_name_their_field(change, field):
    cfg = load_config("ex1-uniform")
    cfg.update(change)
    problems = validate_config(cfg)
    assert problems and any(p.split(":")[0].split(".")[0] == field for p in problems)


@pytest.mark.parametrize("key,value", [("dx", -0.1), ("cfl", 1.2), ("theta", 2.5), ("g", None)])
def test_solver_violations(key, value):
    cfg = load_config("ex4-swe")
    cfg["solver"][key] = value
    assert any(p.startswith(f"solver.{key}") for p in validate_config(cfg))


def test_pde_takes_one_node_count():
    cfg = load_config("ex3-euler")
    cfg["N"] = [51, 101]
    assert any(p.startswith("N:") for p in validate_config(cfg))


def test_unreadable_and_malformed_files(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "missing.json")]) == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["validate", str(bad)]) == EXIT_USAGE
    assert "invalid JSON" in capsys.readouterr().err
    assert validate_config([1, 2]) == ["config: expected a JSON object"]


def test_list_experiments(capsys):
    assert main(["list-experiments"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert [line.split()[0] for line in lines] == list(EXPERIMENTS)


def test_bad_flags_are_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["run", "ex2", "--samples", "0"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE


def test_overrides_and_threads(monkeypatch):
    cfg = load_config("ex2")
    out = apply_overrides(cfg, seed=9, samples=100, threads=3)
    assert (out["seed"], out["M"], out["threads"]) == (9, 100, 3)
    assert cfg["M"] == 1_000_000  # original untouched
    monkeypatch.setenv("SCUQ_THREADS", "5")
    assert resolve_threads(None) == 5 and resolve_threads(2) == 2
    monkeypatch.setenv("SCUQ_THREADS", "zero")
    with pytest.raises(Exception, match="SCUQ_THREADS"):
        resolve_threads(None)


# ---------------------------------------------------------------- run


def test_scalar_run_artifacts_and_rerun(tmp_path):
    path = write_config(tmp_path, small_scalar())
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(path), "--out", str(a)]) == EXIT_OK
    assert main(["run", str(path), "--out", str(b)]) == EXIT_OK
    assert tree(a) == tree(b)

    files = tree(a)
    assert {"errors.csv", "fits.csv", "moments.csv", "manifest.json", "pdfs/reference.csv"} <= set(files)
    assert len([f for f in files if f.startswith("pdfs/")]) == 1 + 5 * 3
    for name, content in files.items():
        if name.endswith(".csv"):
            assert b"\r" not in content and content.endswith(b"\n")
    with open(a / "fits.csv") as fh:
        assert [r["method"] for r in csv.DictReader(fh)] == [
            "gpc", "bspline-interp", "bspline-approx", "sp-spline", "cweno"]
    with open(a / "errors.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 15
    manifest = json.loads(files["manifest.json"])
    assert manifest["seed"] == 2025 and manifest["M"] == 20_000
    assert manifest["config"]["N"] == [7, 10, 16]


def test_seed_override_changes_output(tmp_path):
    path = write_config(tmp_path, small_scalar("ex2"))
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(path), "--out", str(a)]) == EXIT_OK
    assert main(["run", str(path), "--out", str(b), "--seed", "7"]) == EXIT_OK
    assert (a / "errors.csv").read_bytes() != (b / "errors.csv").read_bytes()
    assert json.loads((b / "manifest.json").read_text())["seed"] == 7


def test_run_rejects_invalid_config(tmp_path, capsys):
    cfg = small_scalar()
    cfg["N"] = [4, 10]
    path = write_config(tmp_path, cfg)
    assert main(["run", str(path), "--out", str(tmp_path / "o")]) == EXIT_USAGE
    assert "N:" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


@pytest.mark.parametrize("experiment", ["ex3-euler", "ex4-swe"])
def test_small_pde_run(tmp_path, experiment):
    path = write_config(tmp_path, small_pde(experiment))
    out = tmp_path / "out"
    assert main(["run", str(path), "--out", str(out)]) == EXIT_OK
    names = set(tree(out))
    for m in ("gpc", "bspline-interp", "bspline-approx", "sp-spline", "cweno"):
        assert {f"curves_{m}.csv", f"pdf_surface_{m}.csv"} <= names
    assert "overshoot.csv" in names
    with open(out / "curves_cweno.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows and all(float(r["std"]) >= 0 for r in rows)


def test_solver_failure_exit_code(tmp_path, capsys, monkeypatch):
    import scuq.experiments as ex
    from scuq.errors import StateError

    def failing(*args, **kwargs):
        raise StateError("negative or invalid depth", cell=3, time=0.1)

    monkeypatch.setattr(ex, "solve", failing)
    path = write_config(tmp_path, small_pde("ex4-swe"))
    assert main(["run", str(path), "--out", str(tmp_path / "o")]) == EXIT_FAILURE
    assert "solver failure" in capsys.readouterr().err


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "scuq.cli", "list-experiments"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "ex4-swe" in res.stdout
    res = subprocess.run([sys.executable, "-m", "scuq.cli", "validate", "ex1-normal"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "ok"
