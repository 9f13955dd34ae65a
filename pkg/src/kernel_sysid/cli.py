"""Kernel-regression system identification from the command line.

Exit codes: 0 success / all checks pass, 1 acceptance failure or report
differences, 2 usage or config error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from pydantic import ValidationError

from . import experiment as ex
from .dynamics import Trajectory
from .errors import ConvergenceError, DimensionError, IllConditionedError, TrajectoryOverflowError, UndefinedSigmaError
from .repro import EXAMPLE_IDS, run_example

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
NUMERIC_ERRORS = (IllConditionedError, ConvergenceError, TrajectoryOverflowError, UndefinedSigmaError, ArithmeticError)

SUBCOMMAND_TASKS = {
    "identify": ["identify", "compare"],
    "identify-ctrl": ["identify", "compare"],
    "entropy": ["identify", "entropy"],
    "stabilize": ["identify", "stabilize"],
    "bound": ["bound"],
}


class UsageError(Exception):
    pass


def _gamma(text: str):
    if text == "cv":
        return "cv"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a float or 'cv', got {text!r}")


def _common(p: argparse.ArgumentParser, config: bool = True):
    if config:
        p.add_argument("--config", required=True, help="experiment config (JSON)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--seed", type=int, help="override the noise seed")
    p.add_argument("--mode", choices=["paper", "representer"], help="kernel expansion mode")
    p.add_argument("--gamma", type=_gamma, help="fixed regularization or 'cv'")
    p.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kernel-sysid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("simulate", help="write a trajectory CSV")
    _common(p)
    for name, text in (("identify", "identify A of an autonomous system"), ("identify-ctrl", "identify A and B from input data")):
        p = sub.add_parser(name, help=f"{text} and compare rollouts")
        _common(p)
        p.add_argument("--data", help="trajectory CSV to identify from instead of simulating")
    for name, text in (
        ("entropy", "topological entropy of A and A_hat"),
        ("stabilize", "LQR design on the estimate, checked on the true plant"),
        ("bound", "sample-error bound table"),
    ):
        p = sub.add_parser(name, help=text)
        _common(p)
        p.add_argument("--data", help="trajectory CSV")
    p = sub.add_parser("run", help="run the tasks listed in the config")
    _common(p)
    p.add_argument("--data", help="trajectory CSV")
    p = sub.add_parser("repro", help="reproduce a worked example")
    p.add_argument("example_id", help=f"one of {', '.join(EXAMPLE_IDS)}")
    _common(p, config=False)
    p.add_argument("--tol", type=float, help="override every numeric check tolerance")
    p = sub.add_parser("report-diff", help="compare two report files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--tol", type=float, default=1e-12, help="relative tolerance")
    p.add_argument("--atol", type=float, default=0.0)
    p.add_argument("--quiet", action="store_true")
    return parser


def _apply_overrides(cfg: ex.ExperimentConfig, args) -> ex.ExperimentConfig:
    data = cfg.model_dump()
    if args.seed is not None:
        if data["noise"] is None:
            data["noise"] = {"amplitude": 0.0, "seed": args.seed}
        else:
            data["noise"]["seed"] = args.seed
    if args.mode is not None:
        data["ident"]["mode"] = "paper-literal" if args.mode == "paper" else "representer"
    if args.gamma is not None:
        data["ident"]["gamma"] = args.gamma
    return ex.ExperimentConfig.model_validate(data)


def _load(args) -> ex.ExperimentConfig:
    try:
        cfg = ex.load_config(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}")
    return _apply_overrides(cfg, args)


def _emit(text: str, args) -> None:
    if args.out:
        ex.write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _print_table(rows, quiet: bool, stream=None):
    if quiet:
        return
    stream = stream or sys.stderr
    w = max(len(r[0]) for r in rows)
    for name, *rest in rows:
        print(f"{name:<{w}}  " + "  ".join(str(x) for x in rest), file=stream)


def cmd_simulate(args) -> int:
    cfg = _load(args)
    _emit(ex.simulate(cfg).to_csv(), args)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    cfg = _load(args)
    if args.command == "identify-ctrl" and not cfg.controlled:
        raise UsageError("identify-ctrl needs a config with B and input_signal")
    if args.command == "identify" and cfg.controlled:
        raise UsageError("config describes a controlled system; use identify-ctrl")
    traj: Optional[Trajectory] = None
    if getattr(args, "data", None):
        try:
            traj = Trajectory.from_csv(args.data)
        except OSError as exc:
            raise UsageError(f"cannot read data: {exc}")
    tasks = SUBCOMMAND_TASKS.get(args.command)
    report = ex.run(cfg, traj, tasks)
    _emit(ex.dumps(report), args)
    if args.command == "bound":
        _print_table([(k, report["bound"][k]) for k in ("kappa", "||L_w||", "B_w", "sigma_w^2", "eps_samp")], args.quiet)
    if args.command == "entropy":
        e = report["entropy"]
        rows = [("formula", "A", "A_hat")]
        for k, label in (
            ("paper", "sum |l|, |l|>=1"),
            ("paper_literal", "sum max(1,|l|)"),
            ("bowen", "sum log|l|, |l|>1"),
        ):
            rows.append((label, e[k]["A"], e[k].get("A_hat", "-")))
        _print_table(rows, args.quiet)
    return EXIT_OK


def cmd_repro(args) -> int:
    if args.example_id not in EXAMPLE_IDS:
        raise UsageError(f"unknown example id {args.example_id!r}; choose from {', '.join(EXAMPLE_IDS)}")
    reports, checks = run_example(args.example_id, lambda c: _apply_overrides(c, args), args.tol)
    out = {
        "example": args.example_id,
        "reports": reports,
        "checks": [c.__dict__ for c in checks],
        "passed": all(c.passed for c in checks),
    }
    _emit(ex.dumps(out), args)
    rows = [("check", "value", "target", "tol", "result")]
    rows += [(c.name, f"{c.value:.6g}", c.target, f"{c.tol:g}", "PASS" if c.passed else "FAIL") for c in checks]
    _print_table(rows, args.quiet)
    return EXIT_OK if out["passed"] else EXIT_FAIL


def cmd_report_diff(args) -> int:
    try:
        with open(args.a) as fa, open(args.b) as fb:
            a, b = json.load(fa), json.load(fb)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read report: {exc}")
    diffs = ex.diff_reports(a, b, rtol=args.tol, atol=args.atol)
    if not args.quiet:
        for path, what in diffs:
            print(f"{path}: {what}")
        print(f"{len(diffs)} difference(s)")
    return EXIT_OK if not diffs else EXIT_FAIL


COMMANDS = {
    "simulate": cmd_simulate,
    "repro": cmd_repro,
    "report-diff": cmd_report_diff,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    handler = COMMANDS.get(args.command, cmd_pipeline)
    try:
        return handler(args)
    except ValidationError as exc:
        for err in exc.errors():
            loc = ".".join(str(p) for p in err["loc"]) or "<root>"
            print(f"config error at {loc}: {err['msg']}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, DimensionError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
