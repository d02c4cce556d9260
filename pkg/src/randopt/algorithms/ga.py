"""Genetic algorithm: roulette parent selection, crossover, offspring mutation.

Each generation breeds ``pop_size`` offspring; the next population is the
fittest ``pop_size`` of parents and offspring together, so the best member
is never lost.
"""

from __future__ import annotations

import time
from typing import Optional

import numpy as np

from ..core import BIT, BestTracker, EvalCounter, ProblemSpec, RunRecord, evaluate, random_state
from .configs import GaConfig, config_params


def selection_probabilities(scores: np.ndarray) -> np.ndarray:
    """Fitness-proportional weights; non-positive scores are shifted to start at 1."""
    scores = np.asarray(scores, dtype=float)
    if scores.min() <= 0:
        scores = scores - scores.min() + 1.0
    return scores / scores.sum()


def single_point_crossover(p1: np.ndarray, p2: np.ndarray, cross_point: int) -> np.ndarray:
    """First ``cross_point`` genes from ``p1``, the rest from ``p2``."""
    child = np.array(p2, copy=True)
    child[:cross_point] = p1[:cross_point]
    return child


def ordered_crossover(p1: np.ndarray, p2: np.ndarray, start: int, stop: int) -> np.ndarray:
    """OX1: keep ``p1[start:stop]`` in place, fill the rest in ``p2`` order from ``stop``."""
    n = len(p1)
    child = np.full(n, -1, dtype=np.int64)
    child[start:stop] = p1[start:stop]
    kept = set(int(v) for v in p1[start:stop])
    fill = [int(v) for v in np.roll(p2, -stop) if int(v) not in kept]
    slots = [(stop + k) % n for k in range(n - (stop - start))]
    child[slots] = fill
    return child


def crossover(p1: np.ndarray, p2: np.ndarray, rng: np.random.Generator, kind: str) -> np.ndarray:
    n = len(p1)
    if n < 2:
        return np.array(p1, copy=True)
    if kind == BIT:
        return single_point_crossover(p1, p2, int(rng.integers(1, n)))
    a, b = sorted(rng.choice(n + 1, size=2, replace=False))
    return ordered_crossover(p1, p2, int(a), int(b))


def mutate(child: np.ndarray, rng: np.random.Generator, prob: float, kind: str) -> np.ndarray:
    """With probability ``prob``, flip one random bit or swap two random positions."""
    n = len(child)
    if n < 2 or rng.random() >= prob:
        return child
    i = int(rng.integers(n))
    if kind == BIT:
        child[i] ^= 1
    else:
        j = (i + int(rng.integers(1, n))) % n
        child[i], child[j] = child[j], child[i]
    return child


def ga(problem: ProblemSpec, cfg: GaConfig, rng: np.random.Generator,
       counter: Optional[EvalCounter] = None) -> RunRecord:
    cfg.validate()
    counter = counter if counter is not None else EvalCounter()
    started = time.perf_counter()
    tracker = BestTracker(problem)

    pop = np.array([random_state(problem, rng) for _ in range(cfg.pop_size)])
    scores = np.array([problem.sign * evaluate(problem, s, counter) for s in pop])
    best = int(np.argmax(scores))
    tracker.offer(pop[best], scores[best])

    attempts = 0
    for _ in range(cfg.max_iters):
        probs = selection_probabilities(scores)
        parents = rng.choice(cfg.pop_size, size=(cfg.pop_size, 2), p=probs)
        children = np.array([
            mutate(crossover(pop[i], pop[j], rng, problem.kind), rng, cfg.mutation_prob, problem.kind)
            for i, j in parents
        ])
        child_scores = np.array([problem.sign * evaluate(problem, c, counter) for c in children])
        # offspring displace the least-fit members; incumbents win ties
        merged = np.concatenate([scores, child_scores])
        keep = np.argsort(-merged, kind="stable")[: cfg.pop_size]
        pop = np.concatenate([pop, children])[keep]
        scores = merged[keep]
        if tracker.offer(pop[0], scores[0]):
            attempts = 0
        else:
            attempts += 1
        tracker.tick()
        if attempts >= cfg.max_attempts:
            break

    elapsed = time.perf_counter() - started
    return tracker.record(cfg.name, config_params(cfg), counter, elapsed)
