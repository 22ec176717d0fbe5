"""Command-line front end.

Precedence for every parameter: built-in default < ``--config`` TOML file <
command-line flag. Results go to stdout (and to ``--output-dir`` for
``reproduce``); logs go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from .config import DEFAULT_CONFIG, SolverConfig
from .dist_core import DomainError, PreconditionError, from_spec
from .distortion import pricing_from_spec
from .frechet import Direction, sup_prob
from .numerics import NumericError
from .portfolio import PortfolioProblem, solve_goal_reaching
from .reinsurance import (
    ReinsuranceProblem,
    comonotone_map,
    solve_comonotone,
    solve_no_background,
    solve_with_background,
)
from .robustness import BASE, SweepSpec, dump_json, run_sweep, run_table, table_csv, write_sweep
from .verification import all_ok, verify_coupling, verify_frechet, verify_tables

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

log = logging.getLogger("goalreach")

OUTPUT_DIR_ENV = "GOALREACH_OUTPUT_DIR"

DEFAULTS: dict[str, dict[str, Any]] = {
    "reinsurance": {
        "mode": "robust",
        "w0": BASE.w0,
        "xi": BASE.xi,
        "loss": "trunc_pareto:beta=10,gamma=3,M=10",
        "bg": "trunc_normal:lower=-5,upper=5",
        "distortion": "power:theta=0.5,loading=0.1",
    },
    "portfolio": {
        "x0": 1.0,
        "xi": 1.2,
        "rho": "lognormal:mu=-0.05,sigma=0.4",
        "bg": "trunc_normal:lower=-0.5,upper=0.5",
    },
    "frechet": {
        "direction": "sup_leq",
        "v": "lognormal:mu=0,sigma=0.5",
        "w": "uniform:lo=0.2,hi=2.5",
    },
}
SOLVER_FLAGS = ("portfolio_grid", "reinsurance_grid", "frechet_grid", "root_scan_steps", "indifference_tol")
TABLES = {"table1": "t1", "table2": "t2", "table3": "t3"}
SWEEPS = {"sweep-goal": "goal", "sweep-loading": "loading", "sweep-shape": "shape"}


class UsageError(ValueError):
    pass


def parse_spec(text: str) -> dict:
    """``'{"family": ...}'`` JSON or ``family:k=v,k=v``; empirical samples use ``;``."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise UsageError(f"bad JSON spec {text!r}: {e}") from e
    family, _, rest = text.partition(":")
    spec: dict[str, Any] = {"family": family.strip()}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise UsageError(f"expected key=value in spec {text!r}, got {item!r}")
        if ";" in val:
            spec[key.strip()] = [float(v) for v in val.split(";") if v]
        else:
            try:
                spec[key.strip()] = float(val)
            except ValueError as e:
                raise UsageError(f"non-numeric value in spec {text!r}: {item!r}") from e
    return spec


def _as_spec(value) -> dict:
    return dict(value) if isinstance(value, dict) else parse_spec(str(value))


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise UsageError(f"cannot read config {path}: {e}") from e


def resolve(section: str, file_cfg: dict, args: argparse.Namespace) -> tuple[dict, dict]:
    """Merged parameters and the subset that differs from the built-in defaults."""
    merged = dict(DEFAULTS.get(section, {}))
    merged.update(file_cfg.get(section, {}))
    for key in list(DEFAULTS.get(section, {})):
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    overrides = {k: v for k, v in merged.items() if DEFAULTS[section].get(k) != v}
    return merged, overrides


def solver_config(file_cfg: dict, args: argparse.Namespace) -> SolverConfig:
    vals = dict(file_cfg.get("solver", {}))
    for key in SOLVER_FLAGS:
        v = getattr(args, key, None)
        if v is not None:
            vals[key] = v
    try:
        return DEFAULT_CONFIG.with_overrides(**vals)
    except TypeError as e:
        raise UsageError(f"unknown solver setting: {e}") from e


def output_dir(args: argparse.Namespace, file_cfg: dict) -> Path:
    if args.output_dir:
        return Path(args.output_dir)
    if "output_dir" in file_cfg:
        return Path(file_cfg["output_dir"])
    return Path(os.environ.get(OUTPUT_DIR_ENV, "goalreach-output"))


def emit(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


# ---------------------------------------------------------------------------
# subcommands


def cmd_reinsurance(args, file_cfg) -> int:
    params, overrides = resolve("reinsurance", file_cfg, args)
    cfg = solver_config(file_cfg, args)
    F_X = from_spec(_as_spec(params["loss"]))
    pricing = pricing_from_spec(_as_spec(params["distortion"]))
    mode = params["mode"]
    if mode not in ("none", "robust", "nominal"):
        raise UsageError(f"mode must be none, robust or nominal, got {mode!r}")
    F0 = h = None
    if mode != "none":
        F0 = from_spec(_as_spec(params["bg"]))
    if mode == "nominal":
        h = comonotone_map(F_X, F0)
    p = ReinsuranceProblem(float(params["w0"]), float(params["xi"]), pricing, F_X, F0, h)
    solver = {"none": solve_no_background, "robust": solve_with_background, "nominal": solve_comonotone}[mode]
    sol = solver(p, cfg)
    report = {"mode": mode, "solution": sol.to_dict(), "parameters": params, "overrides": overrides, "solver": cfg.to_dict()}
    emit(dump_json(report))
    return 0


def cmd_portfolio(args, file_cfg) -> int:
    params, overrides = resolve("portfolio", file_cfg, args)
    cfg = solver_config(file_cfg, args)
    p = PortfolioProblem(
        float(params["x0"]), float(params["xi"]), from_spec(_as_spec(params["rho"])), from_spec(_as_spec(params["bg"]))
    )
    sol = solve_goal_reaching(p, cfg)
    emit(dump_json({"solution": sol.to_dict(), "parameters": params, "overrides": overrides, "solver": cfg.to_dict()}))
    return 0


def cmd_frechet(args, file_cfg) -> int:
    params, overrides = resolve("frechet", file_cfg, args)
    cfg = solver_config(file_cfg, args)
    try:
        direction = Direction(params["direction"])
    except ValueError as e:
        raise UsageError(str(e)) from e
    res = sup_prob(direction, from_spec(_as_spec(params["v"])), from_spec(_as_spec(params["w"])), cfg.frechet_grid)
    emit(dump_json({"result": res.to_dict(), "parameters": params, "overrides": overrides}))
    return 0


def cmd_reproduce(args, file_cfg) -> int:
    cfg = solver_config(file_cfg, args)
    base = BASE.with_overrides(**file_cfg.get("base", {}))
    out = output_dir(args, file_cfg)
    out.mkdir(parents=True, exist_ok=True)
    target = args.target
    if target in TABLES:
        rows = run_table(TABLES[target], base, cfg)
        if args.format == "csv":
            text = table_csv(rows)
        else:
            text = dump_json({"table": target, "base": base.to_dict(), "solver": cfg.to_dict(),
                              "rows": [r.__dict__ for r in rows]})
        path = out / f"{target}.{args.format}"
        path.write_text(text)
        log.info("wrote %s", path)
        emit(text)
        return 0
    spec = SweepSpec.default(SWEEPS[target], base)
    report = run_sweep(spec, cfg)
    for r in report.rows:
        if r.error:
            log.warning("%s=%g failed: %s", spec.parameter.value, r.param_value, r.error)
    formats = (args.format, "json") if args.format == "csv" else ("json",)
    for path in write_sweep(report, out, target.replace("-", "_"), formats):
        log.info("wrote %s", path)
    emit(dump_json(report.to_dict()) if args.format == "json" else (out / f"{target.replace('-', '_')}_robust.csv").read_text())
    return 1 if any(r.error for r in report.rows) else 0


def cmd_verify(args, file_cfg) -> int:
    if args.suite in ("frechet", "coupling") and args.seed is None:
        raise UsageError(f"verify {args.suite} needs --seed")
    if args.suite == "frechet":
        checks = verify_frechet(args.seed)
    elif args.suite == "coupling":
        checks = verify_coupling(args.seed)
    else:
        checks = verify_tables(BASE.with_overrides(**file_cfg.get("base", {})), solver_config(file_cfg, args))
    for c in checks:
        emit(c.line() + "\n")
    ok = all_ok(checks)
    log.info("%d/%d checks passed", sum(c.ok for c in checks), len(checks))
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file with [reinsurance], [portfolio], [frechet], [base], [solver] tables")
    common.add_argument("--output-dir", help=f"where reproduce writes files (default ${OUTPUT_DIR_ENV} or ./goalreach-output)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--quiet", action="store_true", help="suppress progress lines on stderr")
    for key in SOLVER_FLAGS:
        kind = float if key == "indifference_tol" else int
        common.add_argument("--" + key.replace("_", "-"), dest=key, type=kind)

    parser = _Parser(prog="goalreach", description="Goal-reaching reinsurance and portfolio solvers.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("reinsurance", parents=[common], help="optimal layer contract")
    p.add_argument("--mode", choices=("none", "robust", "nominal"))
    p.add_argument("--w0", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--loss", help="distribution spec of the insurable loss")
    p.add_argument("--bg", help="distribution spec of the background risk")
    p.add_argument("--distortion", help="e.g. power:theta=0.5,loading=0.1")
    p.set_defaults(func=cmd_reinsurance)

    p = sub.add_parser("portfolio", parents=[common], help="robust goal-reaching digital payoff")
    p.add_argument("--x0", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--rho", help="distribution spec of the pricing kernel")
    p.add_argument("--bg", help="distribution spec of the background risk")
    p.set_defaults(func=cmd_portfolio)

    p = sub.add_parser("frechet", parents=[common], help="extremal P(W <= V) over couplings")
    p.add_argument("--direction", choices=[d.value for d in Direction])
    p.add_argument("--v")
    p.add_argument("--w")
    p.set_defaults(func=cmd_frechet)

    p = sub.add_parser("reproduce", parents=[common], help="regenerate a table or a sweep")
    p.add_argument("target", choices=list(TABLES) + list(SWEEPS))
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("verify", parents=[common], help="run an oracle suite")
    p.add_argument("suite", choices=("frechet", "coupling", "tables"))
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_verify)
    return parser


def dispatch(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        file_cfg = load_config(args.config)
        return args.func(args, file_cfg)
    except (UsageError, DomainError, PreconditionError) as e:
        sys.stderr.write(f"goalreach {args.command}: invalid input: {e}\n")
        return 2
    except (NumericError, ArithmeticError) as e:
        sys.stderr.write(f"goalreach {args.command}: numeric failure: {e}\n")
        return 1


def main() -> None:
    sys.exit(dispatch())
