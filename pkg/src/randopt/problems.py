"""Benchmark fitness functions, neighborhood moves and instance generators."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache, partial
from pathlib import Path
from typing import Optional

import numpy as np

from .core import BIT, PERM, ConfigurationError, ProblemSpec

BINARY_PROBLEMS = ("onemax", "flipflop", "fourpeaks", "sixpeaks", "continuouspeaks")
PERMUTATION_PROBLEMS = ("tsp", "queens")
COMBINATORIAL_PROBLEMS = ("knapsack",)
PROBLEM_NAMES = BINARY_PROBLEMS + PERMUTATION_PROBLEMS + COMBINATORIAL_PROBLEMS

GROUPS = {
    "binary": BINARY_PROBLEMS,
    "permutation": PERMUTATION_PROBLEMS,
    "combinatorial": COMBINATORIAL_PROBLEMS,
}

DEFAULT_SIZES = {
    "onemax": 50, "flipflop": 50, "fourpeaks": 50, "sixpeaks": 50,
    "continuouspeaks": 50, "tsp": 22, "queens": 15, "knapsack": 50,
}
DEFAULT_INSTANCE_SEED = 1


def group_of(name: str) -> str:
    for group, members in GROUPS.items():
        if name in members:
            return group
    raise KeyError(name)


# -- parameter/instance types -------------------------------------------------

@dataclass(frozen=True)
class PeaksParams:
    n: int
    t: int

    def __post_init__(self):
        if not 0 < self.t < self.n:
            raise ConfigurationError(f"peaks threshold must satisfy 0 < T < n, got T={self.t}, n={self.n}")

    @classmethod
    def default(cls, n: int) -> "PeaksParams":
        return cls(n, math.ceil(0.1 * n))


@dataclass(frozen=True)
class QueensParams:
    n: int

    def __post_init__(self):
        if self.n < 4:
            raise ConfigurationError("queens board size must be at least 4")


@dataclass(frozen=True, eq=False)
class TspInstance:
    coords: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.ndim != 2 or coords.shape[1] != 2 or coords.shape[0] < 3:
            raise ConfigurationError("TSP needs at least 3 cities given as (x, y) pairs")
        coords.setflags(write=False)
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.sqrt((diff ** 2).sum(axis=-1))
        dist.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "distances", dist)

    @property
    def n_cities(self) -> int:
        return self.coords.shape[0]

    def to_dict(self) -> dict:
        return {"type": "tsp", "n": self.n_cities, "seed": self.seed,
                "coords": [[float(x), float(y)] for x, y in self.coords]}


@dataclass(frozen=True)
class KnapsackInstance:
    values: tuple
    weights: tuple
    capacity: int
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if len(self.values) != len(self.weights) or not self.values:
            raise ConfigurationError("knapsack values and weights must be non-empty and equally long")
        if min(self.values) <= 0 or min(self.weights) <= 0 or self.capacity <= 0:
            raise ConfigurationError("knapsack values, weights and capacity must be positive")
        if self.capacity < min(self.weights):
            raise ConfigurationError("knapsack capacity admits no item")
        object.__setattr__(self, "_v", np.array(self.values, dtype=np.int64))
        object.__setattr__(self, "_w", np.array(self.weights, dtype=np.int64))

    @property
    def n(self) -> int:
        return len(self.values)

    def to_dict(self) -> dict:
        return {"type": "knapsack", "n": self.n, "seed": self.seed,
                "values": list(self.values), "weights": list(self.weights),
                "capacity": self.capacity}


def save_instance(inst, path) -> None:
    Path(path).write_text(json.dumps(inst.to_dict(), indent=2) + "\n")


def load_instance(path):
    data = json.loads(Path(path).read_text())
    kind = data.get("type")
    if kind == "tsp":
        inst = TspInstance(np.array(data["coords"], dtype=float), seed=data.get("seed"))
        if inst.n_cities != data["n"]:
            raise ConfigurationError(f"{path}: n={data['n']} but {inst.n_cities} coordinates given")
        return inst
    if kind == "knapsack":
        inst = KnapsackInstance(data["values"], data["weights"], int(data["capacity"]), seed=data.get("seed"))
        if inst.n != data["n"]:
            raise ConfigurationError(f"{path}: n={data['n']} but {inst.n} items given")
        return inst
    raise ConfigurationError(f"{path}: unknown instance type {kind!r}")


def generate_tsp(n: int, rng: np.random.Generator, seed: Optional[int] = None) -> TspInstance:
    if n < 3:
        raise ConfigurationError("TSP needs n >= 3")
    return TspInstance(rng.random((n, 2)), seed=seed)


def generate_knapsack(n: int, rng: np.random.Generator, seed: Optional[int] = None) -> KnapsackInstance:
    if n < 1:
        raise ConfigurationError("knapsack needs n >= 1")
    values = rng.integers(1, 21, size=n)
    weights = rng.integers(1, 21, size=n)
    capacity = math.ceil(0.35 * int(weights.sum()))
    return KnapsackInstance(values, weights, capacity, seed=seed)


# -- fitness functions --------------------------------------------------------

def onemax(x) -> float:
    return float(np.sum(x))


def flipflop(x) -> float:
    x = np.asarray(x)
    return float(np.count_nonzero(x[1:] != x[:-1]))


def _head(x: np.ndarray, bit: int) -> int:
    hits = np.flatnonzero(x != bit)
    return int(hits[0]) if hits.size else x.shape[0]


def _tail(x: np.ndarray, bit: int) -> int:
    hits = np.flatnonzero(x != bit)
    return x.shape[0] - 1 - int(hits[-1]) if hits.size else x.shape[0]


def _longest_run(x: np.ndarray, bit: int) -> int:
    padded = np.concatenate(([0], (x == bit).astype(np.int8), [0]))
    edges = np.flatnonzero(np.diff(padded))
    if edges.size == 0:
        return 0
    return int((edges[1::2] - edges[0::2]).max())


def four_peaks(x, p: PeaksParams) -> float:
    x = np.asarray(x)
    head1, tail0 = _head(x, 1), _tail(x, 0)
    bonus = p.n if head1 > p.t and tail0 > p.t else 0
    return float(max(head1, tail0) + bonus)


def six_peaks(x, p: PeaksParams) -> float:
    x = np.asarray(x)
    head1, tail0 = _head(x, 1), _tail(x, 0)
    head0, tail1 = _head(x, 0), _tail(x, 1)
    hit = (head1 > p.t and tail0 > p.t) or (head0 > p.t and tail1 > p.t)
    return float(max(head1, tail0) + (p.n if hit else 0))


def continuous_peaks(x, p: PeaksParams) -> float:
    x = np.asarray(x)
    run0, run1 = _longest_run(x, 0), _longest_run(x, 1)
    bonus = p.n if run0 > p.t and run1 > p.t else 0
    return float(max(run0, run1) + bonus)


def tsp_length(order, inst: TspInstance) -> float:
    order = np.asarray(order)
    return float(inst.distances[order, np.roll(order, -1)].sum())


@lru_cache(maxsize=None)
def _pairs(n: int):
    return np.triu_indices(n, k=1)


def queens_fitness(order, q: QueensParams) -> float:
    """Non-attacking queen pairs; ``order[i]`` is the row of the queen in column i."""
    order = np.asarray(order)
    i, j = _pairs(q.n)
    attacks = np.count_nonzero(
        (order[i] == order[j]) | (np.abs(order[i] - order[j]) == j - i)
    )
    return float(q.n * (q.n - 1) // 2 - attacks)


def knapsack_value(x, inst: KnapsackInstance) -> float:
    x = np.asarray(x)
    if int(np.dot(x, inst._w)) > inst.capacity:
        return 0.0
    return float(np.dot(x, inst._v))


# -- neighborhood -------------------------------------------------------------

def neighbor(state, rng: np.random.Generator, kind: Optional[str] = None) -> np.ndarray:
    """Flip one bit, or swap two distinct positions of a permutation.

    ``kind`` defaults to bit when every entry is 0 or 1 (so ``[0, 1]`` is read
    as bits); optimizers always pass their problem's kind.
    """
    state = np.asarray(state)
    out = state.copy()
    n = state.shape[0]
    if kind is None:
        kind = BIT if np.all((state == 0) | (state == 1)) else PERM
    if kind == BIT:
        i = rng.integers(n)
        out[i] = 1 - out[i]
    else:
        i, j = rng.choice(n, size=2, replace=False)
        out[i], out[j] = out[j], out[i]
    return out


# -- problem construction ------------------------------------------------------

def make_problem(name: str, n: Optional[int] = None, t: Optional[int] = None,
                 instance_seed: int = DEFAULT_INSTANCE_SEED, instance=None) -> ProblemSpec:
    """Build one of the eight benchmark problems with the default sizing rules."""
    name = name.lower()
    if name not in PROBLEM_NAMES:
        raise ConfigurationError(f"unknown problem {name!r}; valid: {', '.join(PROBLEM_NAMES)}")
    if n is None:
        n = instance.n_cities if isinstance(instance, TspInstance) else (
            instance.n if isinstance(instance, KnapsackInstance) else DEFAULT_SIZES[name])
    if n < 1:
        raise ConfigurationError("problem size must be positive")

    if name == "onemax":
        return ProblemSpec(name, BIT, n, onemax)
    if name == "flipflop":
        return ProblemSpec(name, BIT, n, flipflop)
    if name in ("fourpeaks", "sixpeaks", "continuouspeaks"):
        p = PeaksParams(n, t) if t is not None else PeaksParams.default(n)
        fn = {"fourpeaks": four_peaks, "sixpeaks": six_peaks, "continuouspeaks": continuous_peaks}[name]
        return ProblemSpec(name, BIT, n, partial(fn, p=p), params={"t": p.t}, instance=p)
    if name == "queens":
        q = QueensParams(n)
        return ProblemSpec(name, PERM, n, partial(queens_fitness, q=q), instance=q)
    if name == "tsp":
        if instance is None:
            instance = generate_tsp(n, np.random.default_rng(instance_seed), seed=instance_seed)
        if instance.n_cities != n:
            raise ConfigurationError("TSP instance size does not match n")
        return ProblemSpec(name, PERM, n, partial(tsp_length, inst=instance), maximize=False,
                           params={"seed": instance.seed}, instance=instance)
    if instance is None:
        instance = generate_knapsack(n, np.random.default_rng(instance_seed), seed=instance_seed)
    if instance.n != n:
        raise ConfigurationError("knapsack instance size does not match n")
    return ProblemSpec(name, BIT, n, partial(knapsack_value, inst=instance),
                       params={"seed": instance.seed}, instance=instance)


def default_problems() -> list[ProblemSpec]:
    return [make_problem(name) for name in PROBLEM_NAMES]


def known_optimum(problem: ProblemSpec) -> Optional[float]:
    """Exact optimum, from closed form or an exhaustive/DP oracle where feasible."""
    n = problem.n
    if problem.name == "onemax":
        return float(n)
    if problem.name == "flipflop":
        return float(n - 1)
    if problem.name in ("fourpeaks", "sixpeaks", "continuouspeaks"):
        return float(2 * n - problem.instance.t - 1)
    if problem.name == "queens":
        return float(n * (n - 1) // 2)
    from . import oracles

    if problem.name == "tsp":
        if n > oracles.TSP_EXHAUSTIVE_MAX:
            return None
        return _tsp_optimum_cached(problem.instance)
    if problem.name == "knapsack":
        return _knapsack_optimum_cached(problem.instance)
    return None


@lru_cache(maxsize=32)
def _knapsack_optimum_cached(inst: KnapsackInstance) -> float:
    from .oracles import knapsack_dp
    return knapsack_dp(inst)[0]


_tsp_cache: dict = {}


def _tsp_optimum_cached(inst: TspInstance) -> float:
    from .oracles import tsp_exhaustive
    key = inst.coords.tobytes()
    if key not in _tsp_cache:
        _tsp_cache[key] = tsp_exhaustive(inst)[0]
    return _tsp_cache[key]
