"""Experiment configurations and runners for the four numerical studies.

Configurations are JSON objects.  ``validate_config`` checks one without
running it; ``run_experiment`` executes it and writes plot-ready CSV files
plus a ``manifest.json`` into the output directory.
"""

from __future__ import annotations

import copy
import csv
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigurationError
from .pipeline import (METHODS, MIN_NODES, SurrogateMethod, build_surrogate, coefficient_moments,
                       collocation_nodes, field_pipeline, pdf_of, sample_surrogate)
from .random_space import CollocationSet, RandomVariable, sample
from .solvers import (EulerModel, Grid1D, ShallowWaterModel, euler_conserved, solve,
                      write_snapshots)
from .statistics import (MOMENT_CONVENTIONS, OVERFLOW_RULES, auto_bins, build_pdf, l1_pdf_error,
                         power_law_fit, write_pdf_csv)

log = logging.getLogger(__name__)

EXPERIMENTS = ("ex1-uniform", "ex1-normal", "ex2", "ex3-euler", "ex4-swe")
DESCRIPTIONS = {
    "ex1-uniform": "U = 3 cos(pi xi), xi ~ U[-1, 1]: PDF convergence of the five surrogates",
    "ex1-normal": "U = 3 cos(pi xi), xi ~ N(0, 0.33^2) truncated at 6 sigma",
    "ex2": "U = -/+ 3 cos(pi xi) with a jump at xi = 0.1, xi ~ U[-1, 1]",
    "ex3-euler": "Sod shock tube with left density 1 + 0.1 xi, xi ~ N(0, 1/36)",
    "ex4-swe": "dam break over a random-height bump, xi ~ U[-1, 1]",
}
CONFIG_DIR = Path(__file__).resolve().parent / "configs"
PDE_EXPERIMENTS = ("ex3-euler", "ex4-swe")
THREADS_ENV = "SCUQ_THREADS"


# ------------------------------------------------------------------ configs


def shipped_config_path(experiment: str) -> Path:
    return CONFIG_DIR / f"{experiment}.json"


def load_config(source) -> dict:
    """Read a config from a path, or a shipped default given its experiment id."""
    path = Path(source)
    if not path.exists() and str(source) in EXPERIMENTS:
        path = shipped_config_path(str(source))
    with open(path) as fh:
        return json.load(fh)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def validate_config(cfg) -> list[str]:
    """Schema and range violations, each naming the offending field."""
    if not isinstance(cfg, dict):
        return ["config: expected a JSON object"]
    errors = []
    exp = cfg.get("experiment")
    if exp not in EXPERIMENTS:
        errors.append(f"experiment: expected one of {', '.join(EXPERIMENTS)}, got {exp!r}")

    methods = cfg.get("methods")
    parsed = []
    if not isinstance(methods, list) or not methods:
        errors.append("methods: expected a non-empty list")
    else:
        for m in methods:
            try:
                parsed.append(SurrogateMethod.parse(m))
            except ConfigurationError as exc:
                errors.append(f"methods: {exc}")
        if len(set(methods)) != len(methods):
            errors.append("methods: duplicate entries")

    Ns = cfg.get("N")
    if not isinstance(Ns, list) or not Ns or not all(_is_int(n) and n > 0 for n in Ns):
        errors.append("N: expected a non-empty list of positive integers")
    else:
        if any(b <= a for a, b in zip(Ns, Ns[1:])):
            errors.append("N: must be sorted ascending without repeats")
        for m in parsed:
            if Ns[0] < MIN_NODES[m]:
                errors.append(f"N: {m.value} needs at least {MIN_NODES[m]} nodes, got {Ns[0]}")
        if exp in PDE_EXPERIMENTS and len(Ns) != 1:
            errors.append("N: PDE experiments take a single node count")

    M = cfg.get("M")
    if not (_is_int(M) and M > 0):
        errors.append(f"M: expected a positive integer, got {M!r}")
    seed = cfg.get("seed")
    if not (_is_int(seed) and 0 <= seed < 2 ** 63):
        errors.append(f"seed: expected a non-negative integer, got {seed!r}")

    law = cfg.get("law")
    if not isinstance(law, dict):
        errors.append("law: expected an object")
    else:
        try:
            _law(law)
        except (ConfigurationError, TypeError) as exc:
            errors.append(f"law: {exc}")
        for key in ("a", "b", "mu"):
            if key in law and not _is_number(law[key]):
                errors.append(f"law.{key}: expected a number")
        for key in ("sigma", "truncation"):
            if key in law and not (_is_number(law[key]) and law[key] > 0):
                errors.append(f"law.{key}: expected a positive number")

    if cfg.get("convention", "paper") not in MOMENT_CONVENTIONS:
        errors.append(f"convention: expected one of {', '.join(MOMENT_CONVENTIONS)}")
    if cfg.get("overflow", "clip") not in OVERFLOW_RULES:
        errors.append(f"overflow: expected one of {', '.join(OVERFLOW_RULES)}")
    max_bins = cfg.get("max_bins")
    if max_bins is not None and not (_is_int(max_bins) and max_bins > 0):
        errors.append("max_bins: expected a positive integer or null")
    threads = cfg.get("threads")
    if threads is not None and not (_is_int(threads) and threads > 0):
        errors.append("threads: expected a positive integer or null")

    fn = cfg.get("function", {})
    if not isinstance(fn, dict):
        errors.append("function: expected an object")
    else:
        if "amplitude" in fn and not _is_number(fn["amplitude"]):
            errors.append("function.amplitude: expected a number")
        if "threshold" in fn and not _is_number(fn["threshold"]):
            errors.append("function.threshold: expected a number")

    if exp in PDE_EXPERIMENTS:
        solver = cfg.get("solver")
        if not isinstance(solver, dict):
            errors.append("solver: expected an object")
        else:
            needed = ("dx", "cfl", "T", "gamma") if exp == "ex3-euler" else ("dx", "cfl", "T", "g")
            for key in needed + ("theta",):
                v = solver.get(key)
                if key == "theta" and v is None:
                    continue
                if not (_is_number(v) and v > 0):
                    errors.append(f"solver.{key}: expected a positive number, got {v!r}")
            if _is_number(solver.get("cfl")) and not solver["cfl"] < 1:
                errors.append("solver.cfl: must be below 1")
            if _is_number(solver.get("theta")) and not 1 <= solver["theta"] <= 2:
                errors.append("solver.theta: must lie in [1, 2]")
    return errors


def _law(spec: dict) -> RandomVariable:
    kind = spec.get("kind")
    if kind == "uniform":
        return RandomVariable.uniform(spec.get("a", -1.0), spec.get("b", 1.0))
    if kind == "normal":
        return RandomVariable.normal(spec.get("mu", 0.0), spec.get("sigma", 1.0),
                                     spec.get("truncation", 6.0))
    raise ConfigurationError(f"unknown law kind {kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    methods: tuple
    N: tuple
    M: int
    seed: int
    law: RandomVariable
    convention: str
    overflow: str
    function: dict
    solver: dict
    threads: int | None
    max_bins: int | None
    raw: dict

    @classmethod
    def from_dict(cls, cfg: dict) -> ExperimentConfig:
        problems = validate_config(cfg)
        if problems:
            raise ConfigurationError("; ".join(problems))
        return cls(
            experiment=cfg["experiment"],
            methods=tuple(SurrogateMethod.parse(m) for m in cfg["methods"]),
            N=tuple(cfg["N"]), M=cfg["M"], seed=cfg["seed"], law=_law(cfg["law"]),
            convention=cfg.get("convention", "paper"), overflow=cfg.get("overflow", "clip"),
            function=dict(cfg.get("function", {})), solver=dict(cfg.get("solver", {})),
            threads=cfg.get("threads"), max_bins=cfg.get("max_bins"), raw=copy.deepcopy(cfg))


def apply_overrides(cfg: dict, seed=None, samples=None, threads=None) -> dict:
    cfg = copy.deepcopy(cfg)
    if seed is not None:
        cfg["seed"] = seed
    if samples is not None:
        cfg["M"] = samples
    if threads is not None:
        cfg["threads"] = threads
    return cfg


def resolve_threads(requested) -> int:
    if requested is not None:
        return int(requested)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ConfigurationError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
        if value < 1:
            raise ConfigurationError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
        return value
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


# ------------------------------------------------------------------ model problems


def smooth_response(amplitude: float = 3.0):
    return lambda xi: amplitude * np.cos(np.pi * np.asarray(xi, dtype=float))


def discontinuous_response(amplitude: float = 3.0, threshold: float = 0.1):
    def U(xi):
        xi = np.asarray(xi, dtype=float)
        return np.where(xi < threshold, -amplitude, amplitude) * np.cos(np.pi * xi)
    return U


def response_for(cfg: ExperimentConfig):
    a = cfg.function.get("amplitude", 3.0)
    if cfg.experiment == "ex2":
        return discontinuous_response(a, cfg.function.get("threshold", 0.1))
    return smooth_response(a)


def exact_moments(cfg: ExperimentConfig):
    """Closed-form (mean, std) of the scalar response, or None if unknown.

    Normal laws use the untruncated Gaussian; at six standard deviations
    the truncation changes these values by less than 1e-8.
    """
    a = cfg.function.get("amplitude", 3.0)
    rv = cfg.law
    if rv.kind == "uniform" and (rv.a, rv.b) == (-1.0, 1.0):
        if cfg.experiment == "ex2":
            t = cfg.function.get("threshold", 0.1)
            if not -1.0 <= t <= 1.0:
                return None
            mean = -a * math.sin(math.pi * t) / math.pi
        else:
            mean = 0.0
        return mean, math.sqrt(0.5 * a * a - mean * mean)
    if rv.kind == "normal" and cfg.experiment == "ex1-normal":
        s2 = (math.pi * rv.sigma) ** 2
        mean = a * math.exp(-0.5 * s2) * math.cos(math.pi * rv.mu)
        second = 0.5 * a * a * (1.0 + math.exp(-2.0 * s2) * math.cos(2.0 * math.pi * rv.mu))
        return mean, math.sqrt(max(second - mean * mean, 0.0))
    return None


def resolution_floor(M: int) -> float:
    """L1 distance produced by moving a single sample to another bin."""
    return 2.0 / M


# ------------------------------------------------------------------ writers


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if _is_int(v):
        return str(v)
    return repr(float(v))


def write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow([_fmt(v) for v in row])


def _write_manifest(out: Path, cfg: ExperimentConfig, extra: dict):
    files = sorted(str(p.relative_to(out)) for p in out.rglob("*")
                   if p.is_file() and p.name != "manifest.json")
    manifest = {"experiment": cfg.experiment, "seed": cfg.seed, "M": cfg.M,
                "version": __version__, "config": cfg.raw, "files": files, **extra}
    path = out / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


# ------------------------------------------------------------------ scalar studies


@dataclass
class ScalarRow:
    method: SurrogateMethod
    N: int
    l1: float
    mean: float
    std: float
    pdf_mean: float
    pdf_std: float
    source: str


def scalar_study(cfg: ExperimentConfig):
    """Reference PDF plus (method, N) errors and moments for Examples 1 and 2.

    All methods are sampled with the same draws as the reference, so the
    comparison is free of sampling noise between methods.
    """
    U = response_for(cfg)
    xi = sample(cfg.law, cfg.M, cfg.seed)
    ref_values = U(xi.values)
    n_bins = auto_bins(ref_values, cfg.max_bins)
    reference = build_pdf(ref_values, n_bins)
    rows, pdfs = [], {}
    for method in cfg.methods:
        for N in cfg.N:
            nodes = collocation_nodes(method, cfg.law, N)
            surrogate = build_surrogate(method, CollocationSet(nodes, U(nodes)), cfg.law)
            values = sample_surrogate(surrogate, xi)
            pdf = build_pdf(values, n_bins, edges=reference.edges, overflow=cfg.overflow)
            _, pm, ps = pdf_of(values, cfg.convention, cfg.max_bins)
            if method is SurrogateMethod.GPC:
                m, s = (float(v) for v in coefficient_moments(surrogate))
                source = "coefficients"
            else:
                m, s, source = pm, ps, "pdf"
            rows.append(ScalarRow(method, N, l1_pdf_error(reference, pdf), m, s, pm, ps, source))
            pdfs[(method, N)] = pdf
            log.info("%s N=%d L1=%.3e", method.value, N, rows[-1].l1)
    return reference, rows, pdfs


def fit_rows(rows, M: int):
    """Power-law fit per method over the errors above the resolution floor."""
    floor = resolution_floor(M)
    fits = {}
    by_method = {}
    for r in rows:
        by_method.setdefault(r.method, []).append(r)
    for method, rs in by_method.items():
        pts = [(r.N, r.l1) for r in rs if r.l1 > floor]
        if len(pts) >= 2:
            fits[method] = power_law_fit(*zip(*pts))
        else:
            fits[method] = None
    return fits, floor


def run_scalar(cfg: ExperimentConfig, out: Path) -> dict:
    reference, rows, pdfs = scalar_study(cfg)
    fits, floor = fit_rows(rows, cfg.M)
    pdf_dir = out / "pdfs"
    pdf_dir.mkdir(parents=True, exist_ok=True)
    write_pdf_csv(pdf_dir / "reference.csv", reference)
    for (method, N), pdf in pdfs.items():
        write_pdf_csv(pdf_dir / f"{method.value}_N{N:03d}.csv", pdf)

    nan = float("nan")
    write_rows(out / "errors.csv", ["method", "N", "l1_error", "above_floor", "K", "k"], [
        (r.method.value, r.N, r.l1, int(r.l1 > floor),
         fits[r.method].K if fits[r.method] else nan,
         fits[r.method].k if fits[r.method] else nan) for r in rows])
    write_rows(out / "fits.csv", ["method", "K", "k", "n_points", "residual"], [
        (m.value, f.K, f.k, f.n_points, f.residual) if f else (m.value, nan, nan, 0, nan)
        for m, f in fits.items()])
    exact = exact_moments(cfg)
    mu, sd = exact if exact else (nan, nan)
    write_rows(out / "moments.csv",
               ["method", "N", "mean", "std", "mean_error", "std_error", "source",
                "pdf_mean", "pdf_std"],
               [(r.method.value, r.N, r.mean, r.std, abs(r.mean - mu), abs(r.std - sd), r.source,
                 r.pdf_mean, r.pdf_std) for r in rows])
    return {"n_bins": reference.n_bins, "resolution_floor": floor,
            "exact_mean": exact[0] if exact else None, "exact_std": exact[1] if exact else None}


# ------------------------------------------------------------------ PDE studies


def sod_initial(xi: float, gamma: float = 1.4):
    def init(x):
        left = x <= 0.5
        rho = np.where(left, 1.0 + 0.1 * xi, 0.125)
        P = np.where(left, 1.0, 0.1)
        return euler_conserved(rho, np.zeros_like(x), P, gamma)
    return init


def bump_topography(xi: float):
    def Z(x):
        x = np.asarray(x, dtype=float)
        bump = np.where(np.abs(x) < 0.2, np.cos(5.0 * np.pi * x) + 2.0, 1.0)
        return 0.125 * xi + 0.125 * bump
    return Z


def dam_break_surface(x):
    return np.where(np.asarray(x) < 0.0, 1.0, 0.5)


def pde_problem(experiment: str, xi: float, solver: dict):
    """(model, grid, initial state, T) for one collocation node."""
    theta = solver.get("theta", 1.3)
    if experiment == "ex3-euler":
        model = EulerModel(gamma=solver["gamma"], theta=theta)
        grid = Grid1D.from_spacing(0.0, 1.0, solver["dx"])
        return model, grid, sod_initial(xi, solver["gamma"]), solver["T"]
    model = ShallowWaterModel(bump_topography(xi), g=solver["g"], theta=theta)
    grid = Grid1D.from_spacing(-1.0, 1.0, solver["dx"])
    return model, grid, model.initial_state(grid, dam_break_surface), solver["T"]


def solve_node(args):
    """Solve one deterministic problem; module level so worker processes can run it."""
    experiment, xi, solver = args
    model, grid, init, T = pde_problem(experiment, float(xi), solver)
    result = solve(model, init, grid, T, solver["cfl"])
    if experiment == "ex3-euler":
        quantity = result.primitive[0]
    else:
        quantity = result.primitive[2]
    return result.x, result.conserved, quantity, result.steps


def solve_nodes(experiment, nodes, solver, threads: int = 1):
    jobs = [(experiment, float(xi), solver) for xi in nodes]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
            results = list(pool.map(solve_node, jobs))
    else:
        results = [solve_node(job) for job in jobs]
    x = results[0][0]
    conserved = [r[1] for r in results]
    field = np.stack([r[2] for r in results])
    return x, conserved, field


QUANTITY = {"ex3-euler": "rho", "ex4-swe": "w"}
COMPONENTS = {"ex3-euler": EulerModel.names, "ex4-swe": ShallowWaterModel.names}


def run_pde(cfg: ExperimentConfig, out: Path, threads: int) -> dict:
    N = cfg.N[0]
    node_sets = {}
    for method in cfg.methods:
        kind = "gauss" if method is SurrogateMethod.GPC else "uniform"
        if kind not in node_sets:
            node_sets[kind] = collocation_nodes(method, cfg.law, N)
    fields = {}
    for kind, nodes in node_sets.items():
        log.info("solving %d %s nodes", len(nodes), kind)
        x, conserved, field = solve_nodes(cfg.experiment, nodes, cfg.solver, threads)
        write_snapshots(out / "snapshots" / kind, x, nodes, conserved, COMPONENTS[cfg.experiment])
        fields[kind] = (nodes, field)

    xi = sample(cfg.law, cfg.M, cfg.seed)
    qty = QUANTITY[cfg.experiment]
    over_rows = []
    for method in cfg.methods:
        nodes, field = fields["gauss" if method is SurrogateMethod.GPC else "uniform"]
        res = field_pipeline(x, nodes, field, method, cfg.law, xi, cfg.convention,
                             max_bins=cfg.max_bins)
        write_rows(out / f"curves_{method.value}.csv", ["x", "mean", "std"],
                   zip(res.x, res.mean, res.std))
        surface = ((xc, u, p) for xc, pdf in zip(res.x, res.pdfs)
                   for u, p in zip(pdf.midpoints, pdf.densities))
        write_rows(out / f"pdf_surface_{method.value}.csv", ["x", "bin_midpoint", "density"], surface)
        over_rows.extend((method.value, xc, o) for xc, o in zip(res.x, res.overshoot))
        log.info("%s: field statistics done", method.value)
    write_rows(out / "overshoot.csv", ["method", "x", "overshoot"], over_rows)
    return {"quantity": qty, "solver_runs": {k: len(v[0]) for k, v in fields.items()},
            "cells": int(len(x))}


# ------------------------------------------------------------------ entry point


def run_experiment(cfg, out=None, threads=None) -> dict:
    """Run a validated config (dict or ExperimentConfig); returns the manifest."""
    if isinstance(cfg, dict):
        cfg = ExperimentConfig.from_dict(cfg)
    out = Path(out if out is not None else cfg.raw.get("output", f"runs/{cfg.experiment}"))
    out.mkdir(parents=True, exist_ok=True)
    if cfg.experiment in PDE_EXPERIMENTS:
        n_threads = resolve_threads(threads if threads is not None else cfg.threads)
        extra = run_pde(cfg, out, n_threads)
    else:
        extra = run_scalar(cfg, out)
    return _write_manifest(out, cfg, extra)
