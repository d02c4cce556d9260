"""Command-line entry point: ``randopt {run,sweep,report,oracle}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import harness, oracles, report
from .algorithms import make_config
from .core import ConfigurationError
from .problems import BINARY_PROBLEMS, PROBLEM_NAMES, make_problem

WORKERS_ENV = "RANDOPT_WORKERS"


class CliError(Exception):
    def __init__(self, message: str, status: int = 2):
        super().__init__(message)
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise CliError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def _add_problem_args(p, n_required=False):
    p.add_argument("problem", help=f"one of: {', '.join(PROBLEM_NAMES)}")
    p.add_argument("--n", type=int, required=n_required, help="problem size")
    p.add_argument("--t", type=int, help="peaks threshold T")
    p.add_argument("--instance-seed", type=int, default=1, help="seed for generated TSP/knapsack instances")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="randopt", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log one line per finished cell")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one algorithm setting on one problem")
    _add_problem_args(run)
    run.add_argument("--alg", required=True, help="RHC, SA, GA or MIMIC")
    run.add_argument("--restarts", type=int)
    run.add_argument("--expconst", type=float)
    run.add_argument("--pop", type=int)
    run.add_argument("--max-iters", type=int)
    run.add_argument("--max-attempts", type=int)
    run.add_argument("--seed", type=int, default=harness.DEFAULT_MASTER_SEED)
    run.add_argument("--trials", type=int, default=1)

    sweep = sub.add_parser("sweep", help="run a full plan and write every report file")
    src = sweep.add_mutually_exclusive_group(required=True)
    src.add_argument("--paper", action="store_true", help="use the built-in 8-problem, 12-setting grid")
    src.add_argument("--plan", type=Path, help="JSON plan file")
    sweep.add_argument("--seed", type=int, help="master seed (overrides the plan file)")
    sweep.add_argument("--trials", type=int, help="trials per cell (overrides the plan file)")
    sweep.add_argument("--out", type=Path, default=Path("results"))
    sweep.add_argument("--workers", type=int)

    rep = sub.add_parser("report", help="re-emit report files from a finished sweep")
    rep.add_argument("--in", dest="src", type=Path, required=True, help="directory written by sweep")
    rep.add_argument("--out", type=Path, help="destination (defaults to --in)")

    orc = sub.add_parser("oracle", help="exact optimum by exhaustive search or DP")
    _add_problem_args(orc, n_required=True)
    return parser


def _emit(line: dict) -> None:
    print(json.dumps(line, sort_keys=True))


def _prepare_out(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise CliError(f"cannot write to output directory {path}: {exc.strerror or exc}", status=1) from None
    return path


def cmd_run(args) -> int:
    params = {
        "restarts": args.restarts, "exp_const": args.expconst, "pop_size": args.pop,
        "max_iters": args.max_iters, "max_attempts": args.max_attempts,
    }
    params = {k: v for k, v in params.items() if v is not None}
    cfg = make_config(args.alg, **params)
    problem = make_problem(args.problem, n=args.n, t=args.t, instance_seed=args.instance_seed)
    s = harness.run_cell(problem, cfg, trials=args.trials, master_seed=args.seed)
    _emit({
        "problem": s.problem_id, "algorithm": s.algorithm, "param": s.param_label,
        "seed": args.seed, "trials": s.trials,
        "best_fitness": s.mean_best_fitness,
        "convergence_iteration": s.mean_convergence_iteration,
        "total_fitness_evals": s.mean_total_evals,
        "wall_clock_s": s.mean_wall_clock_s,
    })
    return 0


def write_reports(summaries, plan, out: Path, settings: dict) -> list:
    files = report.emit_tables(summaries, out, [p.problem_id for p in plan.problems])
    records = [r for s in summaries for r in s.records]
    files += report.emit_curves(records, out)
    files += report.emit_group_summary(summaries, plan.problems, out)
    files.append(out / "summaries.json")
    files[-1].write_text(harness.summaries_to_json(summaries))
    plan_path = out / "plan.json"
    harness.save_plan(plan, plan_path)
    files.append(plan_path)
    report.write_manifest(out, files, harness.plan_hash(plan), settings)
    return files


def cmd_sweep(args) -> int:
    out = _prepare_out(args.out)
    plan = harness.default_grid_plan() if args.paper else harness.load_plan(args.plan)
    if args.seed is not None:
        plan.master_seed = args.seed
    if args.trials is not None:
        plan.trials = args.trials
    workers = args.workers if args.workers is not None else _default_workers()
    summaries = harness.run_plan(plan, workers=workers)
    settings = {
        "source": "default-grid" if args.paper else str(args.plan),
        "master_seed": plan.master_seed, "trials": plan.trials, "workers": workers,
    }
    files = write_reports(summaries, plan, out, settings)
    _emit({"status": "ok", "out": str(out), "cells": len(summaries), "files": len(files) + 1})
    return 0


def cmd_report(args) -> int:
    src = args.src
    try:
        summaries = harness.summaries_from_json((src / "summaries.json").read_text())
        plan = harness.load_plan(src / "plan.json")
        settings = json.loads((src / "manifest.json").read_text()).get("settings", {})
    except FileNotFoundError as exc:
        raise CliError(f"missing sweep output {exc.filename}", status=1) from None
    out = _prepare_out(args.out or src)
    files = write_reports(summaries, plan, out, settings)
    _emit({"status": "ok", "out": str(out), "files": len(files) + 1})
    return 0


def cmd_oracle(args) -> int:
    name = args.problem.lower()
    problem = make_problem(name, n=args.n, t=args.t, instance_seed=args.instance_seed)
    if name in BINARY_PROBLEMS:
        t = problem.params.get("t", 0)
        best, state = oracles.bit_exhaustive(name, problem.n, t=t)
    elif name == "knapsack":
        best, state = oracles.knapsack_dp(problem.instance)
    elif name == "tsp":
        best, state = oracles.tsp_exhaustive(problem.instance)
    else:
        best, state = oracles.queens_exhaustive(problem.n)
    _emit({"problem": problem.problem_id, "optimum": best, "state": [int(v) for v in state]})
    return 0


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "report": cmd_report, "oracle": cmd_oracle}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(message)s", stream=sys.stderr)
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.status
    except (ConfigurationError, oracles.OracleBoundError, ValueError) as exc:
        print(f"error: {' '.join(str(exc).split())}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
