"""CSV tables, convergence curves and per-group summaries from cell summaries."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .core import ProblemSpec
from .problems import GROUPS, group_of, known_optimum

TABLE_HEADER = ("algorithm", "param", "average_fitness", "feval")
CURVE_HEADER = ("problem", "algorithm", "param", "trial", "iteration", "best_fitness")
RESTART_HEADER = ("problem", "algorithm", "param", "trial", "climb", "start_iteration")
GROUP_HEADER = ("group", "algorithm", "mean_percent_of_optimum", "mean_wall_clock_s",
                "mean_wall_clock_per_iteration_s", "mean_convergence_iteration",
                "cells_scored", "cells_excluded")
RANKING_HEADER = ("group", "rank", "algorithm", "mean_percent_of_optimum")
ALGORITHM_ORDER = ("RHC", "SA", "GA", "MIMIC")


class SchemaError(ValueError):
    """Summaries or files do not fit the expected table layout."""


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def file_stem(problem_id: str) -> str:
    """``fourpeaks(n=50,t=5)`` -> ``fourpeaks_n50_t5``."""
    return re.sub(r"_+", "_", re.sub(r"[^A-Za-z0-9]+", "_", problem_id.replace("=", ""))).strip("_")


# -- results tables -------------------------------------------------------------

@dataclass
class ResultsTable:
    problem_id: str
    rows: list = field(default_factory=list)  # (algorithm, param, average_fitness str, feval int)

    @classmethod
    def from_summaries(cls, problem_id: str, summaries: list) -> "ResultsTable":
        rows = [
            (s.algorithm, s.param_label, f"{s.mean_best_fitness:.1f}", int(round(s.mean_convergence_iteration)))
            for s in summaries
        ]
        return cls(problem_id, rows)

    def to_csv(self) -> str:
        return _csv_text(TABLE_HEADER, self.rows)

    @classmethod
    def from_csv(cls, problem_id: str, text: str) -> "ResultsTable":
        reader = csv.reader(io.StringIO(text))
        header = tuple(next(reader, ()))
        if header != TABLE_HEADER:
            raise SchemaError(f"table header must be {','.join(TABLE_HEADER)}, got {','.join(header)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise SchemaError(f"line {lineno}: expected 4 fields, got {len(row)}")
            try:
                rows.append((row[0], row[1], row[2], int(row[3])))
            except ValueError:
                raise SchemaError(f"line {lineno}: feval must be an integer") from None
        return cls(problem_id, rows)


def _check_trials(summaries: list) -> None:
    counts = sorted({s.trials for s in summaries})
    if len(counts) > 1:
        raise SchemaError(f"summaries mix trial counts {counts}; they do not come from one plan")


def _by_problem(summaries: list) -> dict:
    grouped: dict = {}
    for s in summaries:
        grouped.setdefault(s.problem_id, []).append(s)
    return grouped


def emit_tables(summaries: list, out_dir, problem_ids: Optional[list] = None) -> list:
    """Write one ``table_<problem>.csv`` per problem; returns the paths.

    ``problem_ids`` forces a (possibly header-only) file for problems that
    have no summaries.
    """
    _check_trials(summaries)
    out_dir = Path(out_dir)
    grouped = _by_problem(summaries)
    for pid in problem_ids or []:
        grouped.setdefault(pid, [])
    paths = []
    for pid, items in grouped.items():
        path = out_dir / f"table_{file_stem(pid)}.csv"
        path.write_text(ResultsTable.from_summaries(pid, items).to_csv())
        paths.append(path)
    return paths


# -- curves ----------------------------------------------------------------------

def curve_rows(records: list) -> list:
    rows = []
    for r in records:
        label = _label(r)
        for it, value in enumerate(r.curve, start=1):
            rows.append((r.problem_id, r.algorithm, label, r.trial_index, it, repr(float(value))))
    return rows


def _label(record) -> str:
    from .algorithms import make_config  # local: avoids a cycle at import time

    return make_config(record.algorithm, **record.params).param_label


def emit_curves(records: list, out_dir) -> list:
    """Long-format curve points plus the iteration at which each restart began."""
    out_dir = Path(out_dir)
    curves = out_dir / "curves.csv"
    curves.write_text(_csv_text(CURVE_HEADER, curve_rows(records)))
    restarts = []
    for r in records:
        label = _label(r)
        for climb, boundary in enumerate(r.restart_boundaries, start=1):
            restarts.append((r.problem_id, r.algorithm, label, r.trial_index, climb, boundary + 1))
    restart_path = out_dir / "restarts.csv"
    restart_path.write_text(_csv_text(RESTART_HEADER, restarts))
    return [curves, restart_path]


# -- group summaries -----------------------------------------------------------------

def percent_of_optimum(mean: float, optimum: float, maximize: bool) -> float:
    if maximize:
        pct = 100.0 * mean / optimum
    else:
        pct = 100.0 * optimum / mean
    if pct > 100.0 + 1e-9 or pct < 0.0:
        raise ValueError(f"percent of optimum {pct:.3f} outside [0, 100]; optimum or scorer is wrong")
    return min(pct, 100.0)  # absorb rounding in the trial mean


@dataclass
class GroupRow:
    group: str
    algorithm: str
    mean_percent: Optional[float]
    mean_wall_clock_s: float
    mean_wall_clock_per_iteration_s: float
    mean_convergence_iteration: float
    cells_scored: int
    cells_excluded: int


def group_summary(summaries: list, problems: list) -> tuple:
    """Aggregate per (group, algorithm). Returns (rows, ranking).

    A cell is scored when its problem has a known optimum; others (TSP at
    the default size) only count toward time and convergence columns.
    """
    by_id = {p.problem_id: p for p in problems}
    optima = {pid: known_optimum(p) for pid, p in by_id.items()}
    buckets: dict = {}
    for s in summaries:
        problem: ProblemSpec = by_id[s.problem_id]
        key = (group_of(problem.name), s.algorithm)
        b = buckets.setdefault(key, {"pct": [], "wall": [], "per_it": [], "conv": [], "excluded": 0})
        opt = optima[s.problem_id]
        if opt is None:
            b["excluded"] += 1
        else:
            b["pct"].append(percent_of_optimum(s.mean_best_fitness, opt, problem.maximize))
        b["wall"].append(s.mean_wall_clock_s)
        b["per_it"].append(sum(r.wall_clock_s / len(r.curve) for r in s.records) / max(len(s.records), 1))
        b["conv"].append(s.mean_convergence_iteration)

    def mean(xs):
        return sum(xs) / len(xs)

    rows = []
    for group in GROUPS:
        for alg in ALGORITHM_ORDER:
            b = buckets.get((group, alg))
            if b is None:
                continue
            rows.append(GroupRow(group, alg, mean(b["pct"]) if b["pct"] else None,
                                 mean(b["wall"]), mean(b["per_it"]), mean(b["conv"]),
                                 len(b["pct"]), b["excluded"]))
    ranking = []
    for group in GROUPS:
        scored = [r for r in rows if r.group == group and r.mean_percent is not None]
        scored.sort(key=lambda r: (-r.mean_percent, ALGORITHM_ORDER.index(r.algorithm)))
        ranking.extend((group, rank, r.algorithm, r.mean_percent) for rank, r in enumerate(scored, start=1))
    return rows, ranking


def _fmt(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.6g}"


def emit_group_summary(summaries: list, problems: list, out_dir) -> list:
    out_dir = Path(out_dir)
    rows, ranking = group_summary(summaries, problems)
    summary_path = out_dir / "group_summary.csv"
    summary_path.write_text(_csv_text(GROUP_HEADER, [
        (r.group, r.algorithm, _fmt(r.mean_percent), _fmt(r.mean_wall_clock_s),
         _fmt(r.mean_wall_clock_per_iteration_s), _fmt(r.mean_convergence_iteration),
         r.cells_scored, r.cells_excluded)
        for r in rows
    ]))
    ranking_path = out_dir / "group_ranking.csv"
    ranking_path.write_text(_csv_text(RANKING_HEADER, [(g, k, a, _fmt(p)) for g, k, a, p in ranking]))
    return [summary_path, ranking_path]


def read_ranking(path) -> dict:
    """``{group: [algorithm, ...]}`` best first, from an emitted ranking file."""
    out: dict = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(row["group"], []).append((int(row["rank"]), row["algorithm"]))
    return {g: [a for _, a in sorted(v)] for g, v in out.items()}


# -- manifest ------------------------------------------------------------------------

def write_manifest(out_dir, files: list, plan_digest: str, settings: dict) -> Path:
    out_dir = Path(out_dir)
    entries = []
    for path in sorted(Path(p) for p in files):
        entries.append({"path": path.name, "sha256": hashlib.sha256(path.read_bytes()).hexdigest()})
    manifest = {"plan_hash": plan_digest, "settings": settings, "files": entries}
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
