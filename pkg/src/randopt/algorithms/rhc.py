"""Randomized hill climbing with random restarts."""

from __future__ import annotations

import time
from typing import Optional

import numpy as np

from ..core import BestTracker, EvalCounter, ProblemSpec, RunRecord, evaluate, random_state
from ..problems import neighbor
from .configs import RhcConfig, config_params


def rhc_accepts(current: float, candidate: float) -> bool:
    """Move only on strict improvement; a tie keeps the current state."""
    return candidate > current


def hill_climb(problem: ProblemSpec, start: np.ndarray, rng: np.random.Generator,
               max_attempts: int, max_iters: int, counter: EvalCounter,
               tracker: BestTracker, start_score: Optional[float] = None):
    """One climb from ``start``. Returns the final state and its internal score."""
    x = np.array(start, copy=True)
    fx = problem.sign * evaluate(problem, x, counter) if start_score is None else start_score
    tracker.offer(x, fx)
    attempts = 0
    for _ in range(max_iters):
        y = neighbor(x, rng, problem.kind)
        fy = problem.sign * evaluate(problem, y, counter)
        if rhc_accepts(fx, fy):
            x, fx = y, fy
            attempts = 0
            tracker.offer(x, fx)
        else:
            attempts += 1
        tracker.tick()
        if attempts >= max_attempts:
            break
    return x, fx


def rhc(problem: ProblemSpec, cfg: RhcConfig, rng: np.random.Generator,
        counter: Optional[EvalCounter] = None) -> RunRecord:
    cfg.validate()
    counter = counter if counter is not None else EvalCounter()
    started = time.perf_counter()
    tracker = BestTracker(problem)
    boundaries = []
    # climb j draws from child stream j, so a run with more restarts replays
    # the climbs of a run with fewer and then adds new ones
    for climb, climb_rng in enumerate(rng.spawn(cfg.restarts + 1)):
        if climb:
            boundaries.append(len(tracker.curve))
        hill_climb(problem, random_state(problem, climb_rng), climb_rng,
                   cfg.max_attempts, cfg.max_iters, counter, tracker)
    elapsed = time.perf_counter() - started
    return tracker.record(cfg.name, config_params(cfg), counter, elapsed, tuple(boundaries))
