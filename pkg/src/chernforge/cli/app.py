"""argparse front end.  Exit codes: 0 success, 1 check failure, 2 validation error,
3 solver failure, 4 budget refusal."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from ..errors import (
    BudgetExceeded,
    ChernforgeError,
    DegreeError,
    GridMismatch,
    HarmonicObstruction,
    NotClosed,
    NotExact,
    QTooSmall,
    RegularityNotAchieved,
    ResolutionError,
    Stalled,
)
from .config import ConfigError, JobConfig, load_config

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_SOLVER, EXIT_BUDGET = 0, 1, 2, 3, 4

log = logging.getLogger("chernforge")


def _emit(obj, out_dir: str | None, name: str) -> None:
    text = json.dumps(obj, indent=2, default=_json_default)
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / name).write_text(text + "\n")
    print(text)


def _write(out_dir: str | None, name: str, text: str) -> None:
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / name).write_text(text)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _grid(cfg: JobConfig):
    from ..torusforms import TorusGrid

    m, n = cfg.grid_mn()
    return TorusGrid(m, n)


def _form_input(cfg: JobConfig, key: str, degree: int, grid):
    """A form given as a TrigSpec dict or as a generator recipe."""
    from ..decompose import apply_D, apply_Dbar
    from ..regtuples import random_tuple
    from ..torusforms import TrigSpec, random_form

    spec = cfg.get(key)
    if spec is None:
        raise ConfigError(f"{key} is required")
    if "planted" in spec:
        p = spec["planted"]
        extra = set(p) - {"q", "h", "seed"}
        if extra:
            raise ConfigError(f"unknown planted keys {sorted(extra)}")
        t = random_tuple(grid, int(p.get("q", 10)), int(p.get("h", 2)), int(p.get("seed", 0)))
        if degree == 4:
            return apply_D(t)
        return apply_Dbar(t, random_form(grid, 2, int(p.get("h", 2)), int(p.get("seed", 0)) + 1)[0])
    if "random" in spec:
        p = spec["random"]
        extra = set(p) - {"h", "seed", "amplitude"}
        if extra:
            raise ConfigError(f"unknown random keys {sorted(extra)}")
        return random_form(grid, degree, int(p.get("h", 2)), int(p.get("seed", 0)),
                           float(p.get("amplitude", 1.0)))[0]
    try:
        ts = TrigSpec.from_dict(spec)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid {key} spec: {exc}") from exc
    if ts.degree != degree:
        raise ConfigError(f"{key} must have degree {degree}")
    if ts.m != grid.m:
        raise ConfigError(f"{key} is for m={ts.m} but the grid has m={grid.m}")
    return ts.evaluate(grid)


def cmd_verify(cfg: JobConfig) -> int:
    from ..verify import run_suites

    only = cfg.get("only")
    if isinstance(only, str):
        only = [s for s in only.split(",") if s]
    try:
        results = run_suites(only, seed=cfg.get("seed", 0), fault=cfg.get("fault"),
                             overrides=cfg.get("suites"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    summary = {"pass": all(r.passed for r in results), "suites": [r.as_dict() for r in results]}
    _emit(summary, cfg.get("out"), "verify.json")
    return EXIT_OK if summary["pass"] else EXIT_FAIL


def cmd_gen_tuple(cfg: JobConfig) -> int:
    from ..regtuples import generate_null_tuple, null_sum, null_sum_scale, q_min, regularity_check

    grid = _grid(cfg)
    q = cfg.get("q", q_min(grid.m))
    t = generate_null_tuple(grid, q, cfg.get("h", 2), cfg.get("seed", 0),
                            max_retries=cfg.get("max_retries", 20))
    cert = regularity_check(t)
    report = {"grid": {"m": grid.m, "n": grid.n}, "q": q, "certificate": cert.as_dict(),
              "null_sum_relative": null_sum(t).sup_norm() / null_sum_scale(t)}
    _write(cfg.get("out"), "tuple.json", t.to_json())
    _emit(report, cfg.get("out"), "certificate.json")
    return EXIT_OK


def _solver_outputs(cfg: JobConfig, t, report, extra: dict | None = None) -> None:
    out = cfg.get("out")
    _write(out, "tuple.json", t.to_json())
    _write(out, "history.csv", report.history_csv())
    _write(out, "connection.json", json.dumps({
        "type": "diag", "q": t.q, "grid": {"m": t.grid.m, "n": t.grid.n}, "entries_file": "tuple.json",
        "convention": "diag(i w_1, ..., i w_q, -i w_1, ..., -i w_q)"}, indent=2) + "\n")
    body = report.as_dict()
    body.update(extra or {})
    _emit(body, out, "report.json")


def cmd_decompose(cfg: JobConfig) -> int:
    from ..decompose import decompose_exact_4form

    grid = _grid(cfg)
    sigma = _form_input(cfg, "sigma", 4, grid)
    q = cfg.get("q", grid.m * (grid.m + 1) // 2)
    t, report = decompose_exact_4form(sigma, q, cfg.solver_options(), cfg.get("seed", 0))
    _solver_outputs(cfg, t, report)
    return EXIT_OK if report.converged else EXIT_SOLVER


def cmd_realize(cfg: JobConfig) -> int:
    from ..decompose import realize_pontryagin

    grid = _grid(cfg)
    sigma = _form_input(cfg, "sigma", 4, grid)
    q = cfg.get("q", grid.m * (grid.m + 1) // 2)
    _conn, t, report = realize_pontryagin(sigma, q, cfg.solver_options(), cfg.get("seed", 0))
    _solver_outputs(cfg, t, report)
    return EXIT_OK if report.converged else EXIT_SOLVER


def cmd_dbar(cfg: JobConfig) -> int:
    from ..decompose import solve_dbar

    grid = _grid(cfg)
    beta = _form_input(cfg, "beta", 3, grid)
    q = cfg.get("q", grid.m * (grid.m + 1) // 2)
    t, phi, report = solve_dbar(beta, q, cfg.solver_options(), cfg.get("seed", 0))
    _write(cfg.get("out"), "phi.json", json.dumps({"grid": {"m": grid.m, "n": grid.n}, "degree": 2,
                                                   "samples": phi.data.tolist()}))
    _solver_outputs(cfg, t, report)
    return EXIT_OK if report.converged else EXIT_SOLVER


def cmd_lemma(cfg: JobConfig) -> int:
    from ..minorlemma import codim_monte_carlo, lemma_suite

    mode = cfg.get("mode", "symbolic")
    seed = cfg.get("seed", 0)
    out: dict = {}
    if mode not in ("symbolic", "monte-carlo", "both"):
        raise ConfigError("mode must be symbolic, monte-carlo or both")
    if mode in ("symbolic", "both"):
        n = cfg.get("n", 3)
        if n > 4:
            raise BudgetExceeded(f"symbolic mode is limited to n <= 4 (got n={n}); "
                                 "use --mode monte-carlo for rank evidence at this size")
        rep = lemma_suite(n, cfg.get("q", n * (n - 1) // 2 + 1), cfg.get("trials", 2), seed,
                          subsets=cfg.get("subsets"), max_subsets=cfg.get("max_subsets"))
        out["lemma_suite"] = rep.as_dict()
    if mode in ("monte-carlo", "both"):
        m = cfg.get("mc_m", cfg.get("n", 4))
        q = cfg.get("mc_q", cfg.get("q", m * (m + 1) // 2))
        rep = codim_monte_carlo(m, q, cfg.get("mc_trials", 1000), seed)
        out["codim_monte_carlo"] = rep.as_dict()
    _emit(out, cfg.get("out"), "lemma.json")
    ok = out.get("lemma_suite", {}).get("passed", True)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bounds(cfg: JobConfig) -> int:
    from .bounds import bounds

    if cfg.get("m") is None:
        raise ConfigError("bounds needs --m")
    try:
        rep = bounds(cfg.get("m"), cfg.get("k", 1))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _emit(rep.as_dict(), cfg.get("out"), "bounds.json")
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "gen-tuple": cmd_gen_tuple,
    "decompose": cmd_decompose,
    "dbar": cmd_dbar,
    "realize": cmd_realize,
    "lemma": cmd_lemma,
    "bounds": cmd_bounds,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chernforge", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=False, q=False, tol=False):
        p.add_argument("--config", help="JSON job file")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="directory for artifacts")
        if grid:
            p.add_argument("--grid", type=int, help="points per axis")
            p.add_argument("--dim", type=int, help="torus dimension m")
        if q:
            p.add_argument("--q", type=int)
        if tol:
            p.add_argument("--tol", type=float, help="relative sup-norm residual target")
        return p

    p = common(sub.add_parser("verify", help="run the property suites"))
    p.add_argument("--only", help="comma-separated suites")
    p = common(sub.add_parser("gen-tuple", help="seeded regular null tuple"), grid=True, q=True)
    p.add_argument("--h", type=int, help="harmonic band")
    for name, hlp in (("decompose", "sum (d w_i)^2 = sigma"), ("dbar", "sum w_i ^ d w_i + d phi = beta"),
                      ("realize", "connection with p_1 = sigma")):
        common(sub.add_parser(name, help=hlp), grid=True, q=True, tol=True)
    p = common(sub.add_parser("lemma", help="Plücker determinant checks"), q=True)
    p.add_argument("--mode", choices=["symbolic", "monte-carlo", "both"])
    p.add_argument("--n", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--mc-trials", dest="mc_trials", type=int)
    p = sub.add_parser("bounds", help="dimension bounds")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, help="Sp(k) rank for the universal-connection bound (default 1)")
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
    try:
        cfg = load_config(args.command, getattr(args, "config", None), flags)
        return COMMANDS[args.command](cfg)
    except BudgetExceeded as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, NotExact, QTooSmall, DegreeError, GridMismatch, ResolutionError,
            HarmonicObstruction, NotClosed) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (Stalled, RegularityNotAchieved) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        report = getattr(exc, "report", None)
        if report is not None and getattr(args, "out", None):
            _write(args.out, "report.json", json.dumps(report.as_dict(), default=_json_default, indent=2))
        return EXIT_SOLVER
    except ChernforgeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
