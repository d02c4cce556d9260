"""Seeded multi-trial execution of (problem, algorithm, setting) cells."""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .algorithms import CONFIG_TYPES, GaConfig, MimicConfig, RhcConfig, SaConfig, config_params, run_algorithm
from .core import BIT, PERM, ConfigurationError, EvalCounter, ProblemSpec, RunRecord, SeedSpec, derive_trial_rng
from .problems import (
    DEFAULT_INSTANCE_SEED,
    KnapsackInstance,
    PROBLEM_NAMES,
    TspInstance,
    default_problems,
    make_problem,
)

log = logging.getLogger(__name__)

DEFAULT_MASTER_SEED = 42
DEFAULT_TRIALS = 5

DEFAULT_GRID = (
    [RhcConfig(restarts=r) for r in (0, 5, 10)]
    + [SaConfig(exp_const=c) for c in (0.001, 0.005, 0.01)]
    + [GaConfig(pop_size=p) for p in (100, 200, 300)]
    + [MimicConfig(pop_size=p) for p in (100, 200, 300)]
)


class PlanError(ConfigurationError):
    """A plan file or plan object cannot be used."""


@dataclass
class CellSummary:
    problem_id: str
    problem_name: str
    algorithm: str
    params: dict
    param_label: str
    trials: int
    mean_best_fitness: float
    mean_convergence_iteration: float
    mean_wall_clock_s: float
    mean_total_evals: float
    records: list = field(default_factory=list, repr=False)

    @classmethod
    def from_records(cls, problem: ProblemSpec, cfg, records: list) -> "CellSummary":
        n = len(records)
        return cls(
            problem_id=problem.problem_id,
            problem_name=problem.name,
            algorithm=cfg.name,
            params=config_params(cfg),
            param_label=cfg.param_label,
            trials=n,
            mean_best_fitness=sum(r.best_fitness for r in records) / n,
            mean_convergence_iteration=sum(r.convergence_iteration for r in records) / n,
            mean_wall_clock_s=sum(r.wall_clock_s for r in records) / n,
            mean_total_evals=sum(r.total_fitness_evals for r in records) / n,
            records=list(records),
        )


@dataclass
class ExperimentPlan:
    problems: list
    cells: list
    trials: int = DEFAULT_TRIALS
    master_seed: int = DEFAULT_MASTER_SEED

    @staticmethod
    def is_default(cfg) -> bool:
        """True for the baseline setting of each algorithm."""
        return cfg == type(cfg)()

    def validate(self) -> None:
        if not self.problems:
            raise PlanError("plan has no problems")
        if not self.cells:
            raise PlanError("plan has no algorithm cells")
        if self.trials < 1:
            raise PlanError("trials must be at least 1")
        for pos, cfg in enumerate(self.cells):
            try:
                check_cell(self.problems[0], cfg, self.trials)
            except ConfigurationError as exc:
                raise PlanError(f"cell {pos} ({cfg.name} {cfg.param_label}): {exc}") from None
        for pos, problem in enumerate(self.problems):
            if problem.kind not in (BIT, PERM):
                raise PlanError(f"problem {pos} ({problem.problem_id}): unsupported representation")


def default_grid_plan(master_seed: int = DEFAULT_MASTER_SEED, trials: int = DEFAULT_TRIALS) -> ExperimentPlan:
    """All eight default problems crossed with the 4 x 3 hyperparameter grid."""
    return ExperimentPlan(default_problems(), list(DEFAULT_GRID), trials=trials, master_seed=master_seed)


# -- seeding ---------------------------------------------------------------------

def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def seed_params(cfg) -> dict:
    """Settings that feed the seed hash.

    The RHC restart count is left out: settings that differ only in restarts
    share their per-climb streams, so extra restarts only add climbs.
    """
    params = config_params(cfg)
    if cfg.name == "RHC":
        params.pop("restarts")
    return params


def cell_seed(master_seed: int, problem: ProblemSpec, cfg, occurrence: int = 0) -> int:
    """Stable 64-bit seed for a cell.

    Depends on what the cell is, not where it sits in a plan; ``occurrence``
    separates repeated copies of the same cell.
    """
    key = _canonical([master_seed, problem.problem_id, cfg.name, seed_params(cfg), occurrence])
    return int.from_bytes(hashlib.blake2b(key.encode(), digest_size=8).digest(), "little")


# -- execution -------------------------------------------------------------------

def check_cell(problem: ProblemSpec, cfg, trials: int) -> None:
    if trials < 1:
        raise ConfigurationError("trials must be at least 1")
    if type(cfg) not in CONFIG_TYPES.values():
        raise ConfigurationError(f"unknown algorithm configuration {cfg!r}")
    if problem.kind not in (BIT, PERM):
        raise ConfigurationError(f"{problem.problem_id}: unsupported representation {problem.kind!r}")
    cfg.validate()


def run_trial(problem: ProblemSpec, cfg, seed: SeedSpec, counter: Optional[EvalCounter] = None) -> RunRecord:
    record = run_algorithm(problem, cfg, derive_trial_rng(seed), counter)
    return replace(record, trial_index=seed.trial_index)


def run_cell(problem: ProblemSpec, cfg, trials: int = DEFAULT_TRIALS,
             master_seed: int = DEFAULT_MASTER_SEED, occurrence: int = 0) -> CellSummary:
    check_cell(problem, cfg, trials)
    base = cell_seed(master_seed, problem, cfg, occurrence)
    records = [run_trial(problem, cfg, SeedSpec(base, k)) for k in range(trials)]
    return CellSummary.from_records(problem, cfg, records)


def _run_task(task):
    problem, cfg, trials, master_seed, occurrence = task
    return run_cell(problem, cfg, trials, master_seed, occurrence)


def plan_tasks(plan: ExperimentPlan) -> list:
    seen: dict = {}
    tasks = []
    for problem in plan.problems:
        for cfg in plan.cells:
            key = (problem.problem_id, cfg.name, _canonical(config_params(cfg)))
            occurrence = seen.get(key, 0)
            seen[key] = occurrence + 1
            tasks.append((problem, cfg, plan.trials, plan.master_seed, occurrence))
    return tasks


def run_plan(plan: ExperimentPlan, workers: int = 1) -> list:
    """One summary per (problem, cell), in plan order."""
    plan.validate()
    tasks = plan_tasks(plan)
    if workers <= 1:
        out = []
        for task in tasks:
            out.append(_run_task(task))
            log.info("done %s %s %s", task[0].problem_id, task[1].name, task[1].param_label)
        return out
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_task, tasks))


# -- plan files ------------------------------------------------------------------

def problem_to_dict(problem: ProblemSpec) -> dict:
    entry = {"name": problem.name, "n": problem.n}
    if "t" in problem.params:
        entry["t"] = problem.params["t"]
    if isinstance(problem.instance, (TspInstance, KnapsackInstance)):
        if problem.instance.seed is None:
            entry["instance"] = problem.instance.to_dict()
        else:
            entry["instance_seed"] = problem.instance.seed
    return entry


def _problem_from_dict(entry: dict, where: str) -> ProblemSpec:
    if not isinstance(entry, dict):
        raise PlanError(f"{where}: expected an object")
    unknown = set(entry) - {"name", "n", "t", "instance_seed", "instance"}
    if unknown:
        raise PlanError(f"{where}: unknown field(s) {', '.join(sorted(unknown))}")
    if entry.get("name") not in PROBLEM_NAMES:
        raise PlanError(f"{where}.name: expected one of {', '.join(PROBLEM_NAMES)}")
    instance = None
    if "instance" in entry:
        raw = entry["instance"]
        try:
            if raw.get("type") == "tsp":
                instance = TspInstance(np.array(raw["coords"], dtype=float), seed=raw.get("seed"))
            else:
                instance = KnapsackInstance(raw["values"], raw["weights"], int(raw["capacity"]), seed=raw.get("seed"))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise PlanError(f"{where}.instance: {exc}") from None
    for key in ("n", "t", "instance_seed"):
        if key in entry and (not isinstance(entry[key], int) or isinstance(entry[key], bool)):
            raise PlanError(f"{where}.{key}: expected an integer")
    try:
        return make_problem(entry["name"], n=entry.get("n"), t=entry.get("t"),
                            instance_seed=entry.get("instance_seed", DEFAULT_INSTANCE_SEED), instance=instance)
    except ConfigurationError as exc:
        raise PlanError(f"{where}: {exc}") from None


def cell_to_dict(cfg) -> dict:
    return {"algorithm": cfg.name, **config_params(cfg)}


def _cell_from_dict(entry: dict, where: str):
    if not isinstance(entry, dict):
        raise PlanError(f"{where}: expected an object")
    name = str(entry.get("algorithm", "")).upper()
    if name not in CONFIG_TYPES:
        raise PlanError(f"{where}.algorithm: expected one of {', '.join(CONFIG_TYPES)}")
    cls = CONFIG_TYPES[name]
    params = {k: v for k, v in entry.items() if k != "algorithm"}
    fields = cls.__dataclass_fields__
    for key, value in params.items():
        if key not in fields:
            raise PlanError(f"{where}.{key}: not a {name} setting")
        expected = fields[key].type
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        if expected == "int":
            ok = ok and isinstance(value, int)
        if not ok:
            raise PlanError(f"{where}.{key}: expected {expected}")
    cfg = cls(**params)
    try:
        cfg.validate()
    except ConfigurationError as exc:
        raise PlanError(f"{where}: {exc}") from None
    return cfg


def plan_to_dict(plan: ExperimentPlan) -> dict:
    return {
        "master_seed": plan.master_seed,
        "trials": plan.trials,
        "problems": [problem_to_dict(p) for p in plan.problems],
        "cells": [cell_to_dict(c) for c in plan.cells],
    }


def plan_from_dict(data: dict, source: str = "plan") -> ExperimentPlan:
    if not isinstance(data, dict):
        raise PlanError(f"{source}: top level must be an object")
    unknown = set(data) - {"master_seed", "trials", "problems", "cells"}
    if unknown:
        raise PlanError(f"{source}: unknown field(s) {', '.join(sorted(unknown))}")
    for key in ("problems", "cells"):
        if not isinstance(data.get(key), list):
            raise PlanError(f"{source}: field '{key}' must be a list")
    master_seed = data.get("master_seed", DEFAULT_MASTER_SEED)
    trials = data.get("trials", DEFAULT_TRIALS)
    if not isinstance(master_seed, int) or not 0 <= master_seed < 2 ** 64:
        raise PlanError(f"{source}: field 'master_seed' must be a 64-bit unsigned integer")
    if not isinstance(trials, int) or trials < 1:
        raise PlanError(f"{source}: field 'trials' must be a positive integer")
    problems = [_problem_from_dict(e, f"{source}: problems[{i}]") for i, e in enumerate(data["problems"])]
    cells = [_cell_from_dict(e, f"{source}: cells[{i}]") for i, e in enumerate(data["cells"])]
    plan = ExperimentPlan(problems, cells, trials=trials, master_seed=master_seed)
    plan.validate()
    return plan


def save_plan(plan: ExperimentPlan, path) -> None:
    Path(path).write_text(json.dumps(plan_to_dict(plan), indent=2) + "\n")


def load_plan(path) -> ExperimentPlan:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlanError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    return plan_from_dict(data, source=str(path))


def plan_hash(plan: ExperimentPlan) -> str:
    return hashlib.sha256(_canonical(plan_to_dict(plan)).encode()).hexdigest()


# -- summary persistence ----------------------------------------------------------

def record_to_dict(r: RunRecord) -> dict:
    return {
        "problem_id": r.problem_id, "algorithm": r.algorithm, "params": r.params,
        "trial_index": r.trial_index, "best_fitness": r.best_fitness,
        "best_state": list(r.best_state), "convergence_iteration": r.convergence_iteration,
        "total_fitness_evals": r.total_fitness_evals, "wall_clock_s": r.wall_clock_s,
        "curve": r.curve, "restart_boundaries": list(r.restart_boundaries),
    }


def record_from_dict(d: dict) -> RunRecord:
    return RunRecord(
        problem_id=d["problem_id"], algorithm=d["algorithm"], params=d["params"],
        trial_index=d["trial_index"], best_fitness=d["best_fitness"],
        best_state=tuple(d["best_state"]), convergence_iteration=d["convergence_iteration"],
        total_fitness_evals=d["total_fitness_evals"], wall_clock_s=d["wall_clock_s"],
        curve=list(d["curve"]), restart_boundaries=tuple(d["restart_boundaries"]),
    )


def summaries_to_json(summaries: list) -> str:
    out = []
    for s in summaries:
        d = {k: v for k, v in s.__dict__.items() if k != "records"}
        d["records"] = [record_to_dict(r) for r in s.records]
        out.append(d)
    return json.dumps(out)


def summaries_from_json(text: str) -> list:
    out = []
    for d in json.loads(text):
        records = [record_from_dict(r) for r in d.pop("records")]
        out.append(CellSummary(**d, records=records))
    return out
