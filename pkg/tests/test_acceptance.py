"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Criteria 1-7 are deterministic property checks. Criteria 8-16 read the
output of one ``randopt sweep --paper --seed 42`` run (8 problems x 12
settings x 5 trials), shared across the session.
"""

import csv
import itertools
import math
import time
from dataclasses import replace

import numpy as np
import pytest

import reference as ref
from randopt.algorithms import CONFIG_TYPES, run_algorithm
from randopt.algorithms.ga import crossover, single_point_crossover
from randopt.algorithms.mimic import build_dependency_tree, mutual_information
from randopt.algorithms.sa import sa_accepts, temperature
from randopt.algorithms.configs import SaConfig
from randopt.cli import main
from randopt.core import BIT, PERM, EvalCounter
from randopt.harness import summaries_from_json
from randopt.oracles import all_bitstrings
from randopt.problems import (
    PeaksParams, QueensParams, continuous_peaks, default_problems, flipflop,
    four_peaks, generate_knapsack, generate_tsp, knapsack_value, known_optimum, make_problem,
    onemax, queens_fitness, six_peaks, tsp_length,
)
from randopt.report import read_ranking

MASTER_SEED = 42
RUNTIME_BUDGET_S = 600
RESULTS = {}


def report(criterion, ok, detail):
    line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[criterion] = line
    print(line)
    assert ok, line


# -- shared statistical run -------------------------------------------------------------

@pytest.fixture(scope="session")
def sweep(tmp_path_factory):
    out = tmp_path_factory.mktemp("grid")
    started = time.perf_counter()
    status = main(["sweep", "--paper", "--seed", str(MASTER_SEED), "--out", str(out)])
    elapsed = time.perf_counter() - started
    assert status == 0
    summaries = summaries_from_json((out / "summaries.json").read_text())
    cells = {(s.problem_name, s.algorithm, s.param_label): s for s in summaries}
    return {"out": out, "summaries": summaries, "cells": cells, "elapsed": elapsed}


def mean(sweep, problem, alg, label):
    return sweep["cells"][(problem, alg, label)].mean_best_fitness


def means(sweep, problem, alg):
    return {label: s.mean_best_fitness for (p, a, label), s in sweep["cells"].items()
            if p == problem and a == alg}


def fmt(d):
    return ", ".join(f"{k} {v:.1f}" for k, v in d.items())


# -- property criteria ---------------------------------------------------------------------

def test_criterion_01_bit_scorers_match_reference():
    X = all_bitstrings(10)
    p = PeaksParams(10, 1)
    module = {
        "onemax": lambda x: onemax(x), "flipflop": lambda x: flipflop(x),
        "fourpeaks": lambda x: four_peaks(x, p), "sixpeaks": lambda x: six_peaks(x, p),
        "continuouspeaks": lambda x: continuous_peaks(x, p),
    }
    mismatches = sum(
        module[name](x) != ref.BIT_SCORERS[name](list(x), p.t) for name in module for x in X)
    report(1, mismatches == 0, f"{len(X)} strings x 5 problems, {mismatches} mismatches")


def test_criterion_02_permutation_and_knapsack_scorers():
    q = QueensParams(6)
    q_bad = sum(queens_fitness(np.array(s), q) != ref.queens(list(s)) for s in itertools.permutations(range(6)))

    inst = generate_knapsack(12, np.random.default_rng(12))
    subsets = list(itertools.product((0, 1), repeat=12))
    k_bad = sum(knapsack_value(np.array(b), inst) != ref.knapsack(b, inst.values, inst.weights, inst.capacity)
                for b in subsets)
    k_opt = known_optimum(make_problem("knapsack", instance=inst)) == ref.knapsack_brute(
        inst.values, inst.weights, inst.capacity)

    tsp = generate_tsp(15, np.random.default_rng(13))
    rng = np.random.default_rng(14)
    coords = tsp.coords.tolist()
    t_bad = 0
    for _ in range(1000):
        tour = rng.permutation(15)
        length = tsp_length(tour, tsp)
        variants = [np.roll(tour, int(rng.integers(15))), tour[::-1]]
        t_bad += not (math.isclose(length, ref.tour_length(list(tour), coords), abs_tol=1e-9)
                      and all(math.isclose(length, tsp_length(v, tsp), abs_tol=1e-9) for v in variants))
    ok = q_bad == 0 and k_bad == 0 and k_opt and t_bad == 0
    report(2, ok, f"queens 720 perms {q_bad} bad; knapsack 4096 subsets {k_bad} bad, optimum match {k_opt}; "
                  f"tsp 1000 tours {t_bad} bad")


def test_criterion_03_acceptance_frequency():
    rng = np.random.default_rng(3)
    worst = 0.0
    parts = []
    for delta, temp in [(-0.5, 1.0), (-1.0, 0.5), (-2.0, 1.0)]:
        freq = np.mean([sa_accepts(delta, temp, rng) for _ in range(100_000)])
        err = abs(freq - math.exp(delta / temp))
        worst = max(worst, err)
        parts.append(f"({delta},{temp}) {freq:.4f} vs {math.exp(delta / temp):.4f}")
    report(3, worst <= 0.02, "; ".join(parts))


def test_criterion_04_cooling_schedule():
    # the min_temp floor is checked separately; above it T(t) must be the pure exponential
    worst = 0.0
    floor_ok = True
    for c in (0.001, 0.005, 0.01):
        cfg = SaConfig(exp_const=c)
        for t in range(10_001):
            exact = cfg.t0 * math.exp(-c * t)
            got = temperature(t, cfg)
            if exact >= cfg.min_temp:
                worst = max(worst, abs(got - exact))
            else:
                floor_ok &= got == cfg.min_temp
    report(4, worst <= 1e-12 and floor_ok,
           f"max |T(t) - t0 exp(-ct)| above the floor, t <= 1e4, 3 constants = {worst:.2e}; floor held {floor_ok}")


def test_criterion_05_crossover():
    rng = np.random.default_rng(5)
    locus_bad = perm_bad = 0
    for _ in range(10_000):
        n = int(rng.integers(2, 40))
        a, b = rng.integers(0, 2, n), rng.integers(0, 2, n)
        cp = int(rng.integers(1, n))
        child = single_point_crossover(a, b, cp)
        locus_bad += not (np.array_equal(child[:cp], a[:cp]) and np.array_equal(child[cp:], b[cp:]))
        drawn = crossover(a, b, rng, BIT)
        locus_bad += not any(np.array_equal(drawn, np.concatenate([a[:k], b[k:]])) for k in range(1, n))
        pa, pb = rng.permutation(n), rng.permutation(n)
        perm_bad += sorted(crossover(pa, pb, rng, PERM).tolist()) != list(range(n))
    report(5, locus_bad == 0 and perm_bad == 0,
           f"10^4 pairs: {locus_bad} locus violations, {perm_bad} invalid permutation children")


def cayley_trees(n):
    for subset in itertools.combinations(itertools.combinations(range(n), 2), n - 1):
        comp = list(range(n))
        ok = True
        for a, b in subset:
            ca, cb = comp[a], comp[b]
            if ca == cb:
                ok = False
                break
            comp = [ca if c == cb else c for c in comp]
        if ok:
            yield subset


def test_criterion_06_mutual_information_and_chow_liu():
    j = np.array([[0.4, 0.1], [0.2, 0.3]])
    pi, pj = j.sum(1), j.sum(0)
    hand = sum(j[x, y] * math.log(j[x, y] / (pi[x] * pj[y])) for x in (0, 1) for y in (0, 1))
    samples = [[0, 0]] * 4 + [[0, 1]] + [[1, 0]] * 2 + [[1, 1]] * 3
    err1 = abs(mutual_information(samples, 0, 1, 1e-12) - hand)
    err2 = abs(mutual_information([[0, 0], [0, 0], [1, 1], [1, 1]], 0, 1, 1e-12) - math.log(2))
    rng = np.random.default_rng(6)
    trees = {n: list(cayley_trees(n)) for n in range(2, 6)}
    tree_bad = 0
    for _ in range(1000):
        n = int(rng.integers(2, 6))
        w = np.triu(rng.random((n, n)), 1)
        w = w + w.T
        best = max(sum(w[a, b] for a, b in t) for t in trees[n])
        built = build_dependency_tree(w)
        got = sum(w[c, p] for c, p in enumerate(built.parent) if p >= 0)
        tree_bad += abs(got - best) > 1e-12
    ok = err1 <= 1e-10 and err2 <= 1e-10 and tree_bad == 0
    report(6, ok, f"MI errors {err1:.1e}, {err2:.1e}; 1000 random MI matrices, {tree_bad} non-maximal trees")


def test_criterion_07_monotone_curves_and_accounting(sweep):
    bad_curves = 0
    for s in sweep["summaries"]:
        step = -1 if s.problem_name == "tsp" else 1
        for r in s.records:
            bad_curves += any(step * (b - a) < 0 for a, b in zip(r.curve, r.curve[1:]))
    count_bad = 0
    for problem in default_problems():
        for cls in CONFIG_TYPES.values():
            calls = [0]

            def counted(x, f=problem.fitness):
                calls[0] += 1
                return f(x)

            counter = EvalCounter()
            rec = run_algorithm(replace(problem, fitness=counted), cls(), np.random.default_rng(7), counter)
            count_bad += not (calls[0] == counter.total_evals == rec.total_fitness_evals)
    n_records = sum(len(s.records) for s in sweep["summaries"])
    report(7, bad_curves == 0 and count_bad == 0,
           f"{n_records} sweep records, {bad_curves} non-monotone curves; 32 instrumented runs, {count_bad} count mismatches")


# -- statistical criteria --------------------------------------------------------------------

def test_sweep_inventory_and_runtime(sweep):
    names = {p.name for p in sweep["out"].iterdir()}
    tables = [n for n in names if n.startswith("table_")]
    assert len(tables) == 8
    assert {"curves.csv", "group_summary.csv", "group_ranking.csv", "manifest.json"} <= names
    print(f"default sweep: {len(sweep['summaries'])} cells in {sweep['elapsed']:.0f} s")
    assert sweep["elapsed"] < RUNTIME_BUDGET_S


def test_criterion_08_onemax(sweep):
    ga, mimic = means(sweep, "onemax", "GA"), means(sweep, "onemax", "MIMIC")
    rhc = [mean(sweep, "onemax", "RHC", f"Restarts={r}") for r in (0, 5, 10)]
    sa = means(sweep, "onemax", "SA")
    ok = (all(v == 50.0 for v in ga.values())
          and all(mimic[f"PopSize={p}"] >= 49.5 for p in (200, 300))
          and rhc[0] <= rhc[1] <= rhc[2] and rhc[2] >= 42
          and all(38 <= v <= 46 for v in sa.values()))
    report(8, ok, f"GA {fmt(ga)}; MIMIC {fmt(mimic)}; RHC {rhc}; SA {fmt(sa)}")


def test_criterion_09_flipflop(sweep):
    m300 = mean(sweep, "flipflop", "MIMIC", "PopSize=300")
    g100 = mean(sweep, "flipflop", "GA", "PopSize=100")
    r0 = mean(sweep, "flipflop", "RHC", "Restarts=0")
    sa = means(sweep, "flipflop", "SA")
    ok = m300 >= 44 and g100 >= 41 and all(r0 <= v for v in sa.values())
    report(9, ok, f"MIMIC300 {m300:.1f}; GA100 {g100:.1f}; RHC0 {r0:.1f} vs SA {fmt(sa)}")


def test_criterion_10_fourpeaks(sweep):
    g300 = mean(sweep, "fourpeaks", "GA", "PopSize=300")
    rhc = means(sweep, "fourpeaks", "RHC")
    d = [mean(sweep, "fourpeaks", a, l) for a, l in
         (("GA", "PopSize=200"), ("MIMIC", "PopSize=200"), ("SA", "ExpConst=0.005"), ("RHC", "Restarts=0"))]
    ok = g300 >= 70 and all(v <= 15 for v in rhc.values()) and d[0] >= d[1] >= d[2] >= d[3]
    report(10, ok, f"GA300 {g300:.1f}; RHC {fmt(rhc)}; defaults GA/MIMIC/SA/RHC {d}")


def test_criterion_11_sixpeaks(sweep):
    g200 = mean(sweep, "sixpeaks", "GA", "PopSize=200")
    rhc = means(sweep, "sixpeaks", "RHC")
    ok = g200 >= 60 and all(v <= 15 for v in rhc.values())
    report(11, ok, f"GA200 {g200:.1f}; RHC {fmt(rhc)}")


def test_criterion_12_continuouspeaks(sweep):
    sa = means(sweep, "continuouspeaks", "SA")
    g200 = mean(sweep, "continuouspeaks", "GA", "PopSize=200")
    ok = max(sa.values()) >= 55 and g200 >= 65
    report(12, ok, f"SA best over c {max(sa.values()):.1f}; GA200 {g200:.1f}")


def test_criterion_13_queens(sweep):
    top = math.comb(15, 2)
    m300 = mean(sweep, "queens", "MIMIC", "PopSize=300")
    cells = {k: s.mean_best_fitness for k, s in sweep["cells"].items() if k[0] == "queens"}
    low = min(cells.values())
    ok = m300 >= 0.88 * top and low >= 0.75 * top
    report(13, ok, f"MIMIC300 {m300:.1f} (need {0.88 * top:.1f}); lowest cell {low:.1f} (need {0.75 * top:.2f})")


def test_criterion_14_knapsack(sweep):
    opt = known_optimum(make_problem("knapsack"))
    ga = means(sweep, "knapsack", "GA")
    g = mean(sweep, "knapsack", "GA", "PopSize=200")
    s = mean(sweep, "knapsack", "SA", "ExpConst=0.005")
    r = mean(sweep, "knapsack", "RHC", "Restarts=0")
    ok = all(v >= 0.85 * opt for v in ga.values()) and g > s > r
    report(14, ok, f"DP optimum {opt:.0f}; GA {fmt(ga)}; default GA {g:.1f} > SA {s:.1f} > RHC0 {r:.1f}")


def test_criterion_15_cross_group_ordering(sweep):
    ranking = read_ranking(sweep["out"] / "group_ranking.csv")
    rows = list(csv.DictReader((sweep["out"] / "group_summary.csv").open()))
    per_it = {r["algorithm"]: float(r["mean_wall_clock_per_iteration_s"]) for r in rows if r["group"] == "binary"}
    excluded = {r["algorithm"]: int(r["cells_excluded"]) for r in rows if r["group"] == "permutation"}
    order_ok = all(v[-1] == "RHC" and v[0] in ("GA", "MIMIC") for v in ranking.values())
    trend_ok = per_it["MIMIC"] > per_it["GA"]
    flagged = all(v == 3 for v in excluded.values())
    detail = "; ".join(f"{g}: {' > '.join(v)}" for g, v in ranking.items())
    report(15, order_ok and trend_ok and flagged,
           f"{detail}; binary s/iteration MIMIC {per_it['MIMIC']:.2e} vs GA {per_it['GA']:.2e}; "
           f"TSP cells flagged as excluded {flagged}")


def test_criterion_16_tsp_direction(sweep):
    g300 = mean(sweep, "tsp", "GA", "PopSize=300")
    r0 = mean(sweep, "tsp", "RHC", "Restarts=0")
    report(16, g300 < r0, f"GA300 tour {g300:.3f} < RHC0 tour {r0:.3f}")
