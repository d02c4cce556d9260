"""Exact optima by exhaustive enumeration or dynamic programming.

These are small-instance referees: they are vectorized over the whole search
space and share no scoring code with :mod:`randopt.problems`.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

BIT_EXHAUSTIVE_MAX = 20
TSP_EXHAUSTIVE_MAX = 12
QUEENS_EXHAUSTIVE_MAX = 10
KNAPSACK_DP_MAX = 1000

_SUFFIX = 8


class OracleBoundError(ValueError):
    pass


def all_bitstrings(n: int) -> np.ndarray:
    """All 2**n bit vectors, row k holding the binary digits of k (MSB first)."""
    codes = np.arange(2 ** n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(np.int8)


def _head_batch(X: np.ndarray, bit: int) -> np.ndarray:
    other = X != bit
    return np.where(other.any(axis=1), other.argmax(axis=1), X.shape[1])


def _tail_batch(X: np.ndarray, bit: int) -> np.ndarray:
    return _head_batch(X[:, ::-1], bit)


def _longest_run_batch(X: np.ndarray, bit: int) -> np.ndarray:
    run = np.zeros(X.shape[0], dtype=np.int64)
    best = np.zeros(X.shape[0], dtype=np.int64)
    for col in X.T:
        run = np.where(col == bit, run + 1, 0)
        np.maximum(best, run, out=best)
    return best


def bit_scores(name: str, X: np.ndarray, t: int = 0, instance=None) -> np.ndarray:
    """Score every row of ``X`` for a bit problem."""
    n = X.shape[1]
    if name == "onemax":
        return X.sum(axis=1).astype(float)
    if name == "flipflop":
        return (X[:, 1:] != X[:, :-1]).sum(axis=1).astype(float)
    if name in ("fourpeaks", "sixpeaks"):
        h1, t0 = _head_batch(X, 1), _tail_batch(X, 0)
        cond = (h1 > t) & (t0 > t)
        if name == "sixpeaks":
            cond |= (_head_batch(X, 0) > t) & (_tail_batch(X, 1) > t)
        return (np.maximum(h1, t0) + n * cond).astype(float)
    if name == "continuouspeaks":
        r0, r1 = _longest_run_batch(X, 0), _longest_run_batch(X, 1)
        return (np.maximum(r0, r1) + n * ((r0 > t) & (r1 > t))).astype(float)
    if name == "knapsack":
        w = X @ np.asarray(instance.weights)
        v = X @ np.asarray(instance.values)
        return np.where(w <= instance.capacity, v, 0).astype(float)
    raise ValueError(f"{name} is not a bit problem")


def bit_exhaustive(name: str, n: int, t: int = 0, instance=None):
    """Best score and the last optimal string in binary counting order.

    Taking the last one favours leading ones, e.g. ``1111111100`` for
    FourPeaks with n=10, T=1.
    """
    if n > BIT_EXHAUSTIVE_MAX:
        raise OracleBoundError(f"exhaustive bit search is limited to n <= {BIT_EXHAUSTIVE_MAX}")
    X = all_bitstrings(n)
    scores = bit_scores(name, X, t=t, instance=instance)
    k = len(scores) - 1 - int(np.argmax(scores[::-1]))
    return float(scores[k]), X[k].astype(np.int64)


@lru_cache(maxsize=None)
def _index_perms(k: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(k))), dtype=np.int64).reshape(-1, k)


def permutation_blocks(values):
    """Yield all permutations of ``values`` as 2-D arrays, a block at a time."""
    values = np.asarray(values, dtype=np.int64)
    m = values.shape[0]
    k = min(m, _SUFFIX)
    tails = _index_perms(k)
    for prefix in itertools.permutations(range(m), m - k):
        rest = np.setdiff1d(np.arange(m), prefix, assume_unique=True)
        block = np.empty((tails.shape[0], m), dtype=np.int64)
        block[:, : m - k] = values[list(prefix)]
        block[:, m - k:] = values[rest[tails]]
        yield block


def tsp_exhaustive(inst):
    """Shortest closed tour by scanning every ordering with city 0 fixed first."""
    n = inst.n_cities
    if n > TSP_EXHAUSTIVE_MAX:
        raise OracleBoundError(f"exhaustive TSP search is limited to n <= {TSP_EXHAUSTIVE_MAX}")
    d = np.asarray(inst.distances)
    best_len, best_tour = np.inf, None
    for block in permutation_blocks(np.arange(1, n)):
        tours = np.concatenate([np.zeros((block.shape[0], 1), dtype=np.int64), block], axis=1)
        lengths = d[tours, np.roll(tours, -1, axis=1)].sum(axis=1)
        k = int(np.argmin(lengths))
        if lengths[k] < best_len:
            best_len, best_tour = float(lengths[k]), tours[k].copy()
    return best_len, best_tour


def queens_exhaustive(n: int):
    """Most non-attacking pairs over all n! placements."""
    if n > QUEENS_EXHAUSTIVE_MAX:
        raise OracleBoundError(f"exhaustive queens search is limited to n <= {QUEENS_EXHAUSTIVE_MAX}")
    total = n * (n - 1) // 2
    best, best_state = -1, None
    for block in permutation_blocks(np.arange(n)):
        attacks = np.zeros(block.shape[0], dtype=np.int64)
        for i, j in itertools.combinations(range(n), 2):
            attacks += np.abs(block[:, i] - block[:, j]) == (j - i)
        k = int(np.argmin(attacks))
        if total - attacks[k] > best:
            best, best_state = int(total - attacks[k]), block[k].copy()
        if best == total:
            break
    return float(best), best_state


def knapsack_dp(inst):
    """0/1 knapsack optimum by DP over capacity; returns (value, selection)."""
    n = len(inst.values)
    if n > KNAPSACK_DP_MAX:
        raise OracleBoundError(f"knapsack DP is limited to n <= {KNAPSACK_DP_MAX}")
    cap = int(inst.capacity)
    table = np.zeros((n + 1, cap + 1), dtype=np.int64)
    for i, (v, w) in enumerate(zip(inst.values, inst.weights), start=1):
        table[i] = table[i - 1]
        if w <= cap:
            table[i, w:] = np.maximum(table[i - 1, w:], table[i - 1, : cap + 1 - w] + v)
    chosen = np.zeros(n, dtype=np.int64)
    c = cap
    for i in range(n, 0, -1):
        if table[i, c] != table[i - 1, c]:
            chosen[i - 1] = 1
            c -= inst.weights[i - 1]
    return float(table[n, cap]), chosen
