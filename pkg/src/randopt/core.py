"""Solution representations, counted fitness evaluation and seeded RNG streams.

States are plain ``numpy`` integer vectors. A bit problem holds a 0/1 vector
of length ``n``; a permutation problem holds an ordering of ``0..n-1``.
Every fitness call made by an optimizer goes through :func:`evaluate`, which
is the single place where :class:`EvalCounter` is incremented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

BIT = "bit"
PERM = "perm"

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class InvalidStateError(ValueError):
    """A state does not match the representation its problem expects."""


class ConfigurationError(ValueError):
    """An algorithm, problem or plan is misconfigured."""


@dataclass(frozen=True)
class ProblemSpec:
    """Immutable benchmark instance.

    ``fitness`` receives a validated state and returns the raw objective.
    ``maximize`` is False for tour-length problems; optimizers multiply by
    :attr:`sign` so that they always climb.
    """

    name: str
    kind: str
    n: int
    fitness: Callable[[np.ndarray], float] = field(compare=False, repr=False)
    maximize: bool = True
    params: dict = field(default_factory=dict, compare=False)
    instance: Any = field(default=None, compare=False, repr=False)

    @property
    def sign(self) -> float:
        return 1.0 if self.maximize else -1.0

    @property
    def problem_id(self) -> str:
        extras = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return f"{self.name}(n={self.n}{',' + extras if extras else ''})"


class EvalCounter:
    """Running count of fitness-function calls for one run."""

    __slots__ = ("total_evals",)

    def __init__(self) -> None:
        self.total_evals = 0

    def __repr__(self) -> str:
        return f"EvalCounter(total_evals={self.total_evals})"


def validate_state(problem: ProblemSpec, state: np.ndarray) -> None:
    state = np.asarray(state)
    if state.ndim != 1 or state.shape[0] != problem.n:
        raise InvalidStateError(
            f"{problem.name}: expected a state of length {problem.n}, got shape {state.shape}"
        )
    if problem.kind == BIT:
        if not np.all((state == 0) | (state == 1)):
            raise InvalidStateError(f"{problem.name}: bit state contains values other than 0/1")
    elif problem.kind == PERM:
        if not np.array_equal(np.sort(state), np.arange(problem.n)):
            raise InvalidStateError(f"{problem.name}: state is not a permutation of 0..{problem.n - 1}")
    else:
        raise InvalidStateError(f"unknown representation kind {problem.kind!r}")


def evaluate(problem: ProblemSpec, state: np.ndarray, counter: Optional[EvalCounter]) -> float:
    """Score ``state`` on ``problem`` and charge one evaluation to ``counter``."""
    state = np.asarray(state)
    validate_state(problem, state)
    value = float(problem.fitness(state))
    if not math.isfinite(value):
        raise InvalidStateError(f"{problem.name}: fitness is not finite ({value})")
    if counter is not None:
        counter.total_evals += 1
    return value


# -- seeding -----------------------------------------------------------------

def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    trial_index: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.trial_index < 0:
            raise ValueError("trial_index must be non-negative")

    def derived_seed(self) -> int:
        return splitmix64(splitmix64(self.master_seed) ^ ((self.trial_index * _GOLDEN) & _MASK64))


def derive_trial_rng(seed: SeedSpec) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed.derived_seed()))


def random_state(problem: ProblemSpec, rng: np.random.Generator) -> np.ndarray:
    """Uniform random bit vector or uniform random permutation."""
    if problem.kind == BIT:
        return rng.integers(0, 2, size=problem.n, dtype=np.int64)
    if problem.kind == PERM:
        return rng.permutation(problem.n).astype(np.int64)
    raise InvalidStateError(f"unknown representation kind {problem.kind!r}")


# -- run records -----------------------------------------------------------

@dataclass
class RunRecord:
    problem_id: str
    algorithm: str
    params: dict
    trial_index: int
    best_fitness: float
    best_state: tuple
    convergence_iteration: int
    total_fitness_evals: int
    wall_clock_s: float
    curve: list
    restart_boundaries: tuple = ()

    def same_outcome(self, other: "RunRecord") -> bool:
        """Field-wise equality ignoring wall-clock time."""
        return all(
            getattr(self, f) == getattr(other, f)
            for f in self.__dataclass_fields__
            if f != "wall_clock_s"
        )


class BestTracker:
    """Best-so-far bookkeeping shared by the optimizers.

    Works on internal (always maximized) scores and records the raw fitness
    curve, one entry per iteration.
    """

    def __init__(self, problem: ProblemSpec):
        self.problem = problem
        self.best_score = -math.inf
        self.best_state: Optional[np.ndarray] = None
        self.curve: list[float] = []

    def offer(self, state: np.ndarray, score: float) -> bool:
        if score > self.best_score:
            self.best_score = float(score)
            self.best_state = np.array(state, copy=True)
            return True
        return False

    def tick(self) -> None:
        self.curve.append(self.problem.sign * self.best_score)

    def record(self, algorithm: str, params: dict, counter: EvalCounter,
               wall_clock_s: float, restart_boundaries: tuple = ()) -> RunRecord:
        best = self.problem.sign * self.best_score
        conv = next(i for i, v in enumerate(self.curve, start=1) if v == best)
        return RunRecord(
            problem_id=self.problem.problem_id,
            algorithm=algorithm,
            params=dict(params),
            trial_index=0,
            best_fitness=best,
            best_state=tuple(int(v) for v in self.best_state),
            convergence_iteration=conv,
            total_fitness_evals=counter.total_evals,
            wall_clock_s=wall_clock_s,
            curve=list(self.curve),
            restart_boundaries=tuple(restart_boundaries),
        )
