"""Simulated annealing with an exponential-decay cooling schedule."""

from __future__ import annotations

import math
import time
from typing import Optional

import numpy as np

from ..core import BestTracker, EvalCounter, ProblemSpec, RunRecord, evaluate, random_state
from ..problems import neighbor
from .configs import SaConfig, config_params


def temperature(t: int, cfg: SaConfig) -> float:
    """``t0 * exp(-c t)`` floored at ``min_temp``."""
    return max(cfg.t0 * math.exp(-cfg.exp_const * t), cfg.min_temp)


def acceptance_probability(delta: float, temp: float) -> float:
    if delta >= 0:
        return 1.0
    return math.exp(delta / temp)


def sa_accepts(delta: float, temp: float, rng: np.random.Generator) -> bool:
    """Always take an improvement; take a worse move with probability exp(delta / T)."""
    return delta > 0 or rng.random() < acceptance_probability(delta, temp)


def sa(problem: ProblemSpec, cfg: SaConfig, rng: np.random.Generator,
       counter: Optional[EvalCounter] = None) -> RunRecord:
    cfg.validate()
    counter = counter if counter is not None else EvalCounter()
    started = time.perf_counter()
    tracker = BestTracker(problem)

    x = random_state(problem, rng)
    fx = problem.sign * evaluate(problem, x, counter)
    tracker.offer(x, fx)
    attempts = 0
    for t in range(cfg.max_iters):
        temp = temperature(t, cfg)
        y = neighbor(x, rng, problem.kind)
        fy = problem.sign * evaluate(problem, y, counter)
        delta = fy - fx
        if sa_accepts(delta, temp, rng):
            x, fx = y, fy
            attempts = 0
            tracker.offer(x, fx)
        else:
            attempts += 1
        tracker.tick()
        if attempts >= cfg.max_attempts:
            break

    elapsed = time.perf_counter() - started
    return tracker.record(cfg.name, config_params(cfg), counter, elapsed)
