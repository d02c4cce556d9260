"""MIMIC: refit a Chow-Liu dependency tree to the elite set and resample.

Variables are categorical with a common arity: 2 for bit strings and ``n``
for permutations, where variable ``i`` is the value held at position ``i``.
Sampled permutation vectors are repaired to bijections before scoring.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import PERM, BestTracker, EvalCounter, ProblemSpec, RunRecord, evaluate, random_state
from .configs import MimicConfig, config_params


def _joint_counts(samples: np.ndarray, arity: int) -> np.ndarray:
    """Pairwise co-occurrence counts, shape ``(n, n, arity, arity)``."""
    samples = np.asarray(samples, dtype=np.int64)
    m, n = samples.shape
    onehot = np.zeros((m, n, arity))
    onehot[np.arange(m)[:, None], np.arange(n)[None, :], samples] = 1.0
    flat = onehot.reshape(m, n * arity)
    return (flat.T @ flat).reshape(n, arity, n, arity).transpose(0, 2, 1, 3)


def _mi_from_counts(counts: np.ndarray, smoothing: float) -> np.ndarray:
    joint = counts + smoothing
    joint = joint / joint.sum(axis=(-2, -1), keepdims=True)
    pi = joint.sum(axis=-1, keepdims=True)
    pj = joint.sum(axis=-2, keepdims=True)
    return (joint * np.log(joint / (pi * pj))).sum(axis=(-2, -1))


def mutual_information(samples, i: int, j: int, smoothing: float, arity: int = 2) -> float:
    """Mutual information (nats) of variables ``i`` and ``j`` over ``samples``.

    ``smoothing`` is added to every cell of the ``arity x arity`` joint count
    table before normalizing.
    """
    if i == j:
        raise ValueError("mutual information needs two distinct variables")
    samples = np.asarray(samples, dtype=np.int64)
    if samples.shape[0] == 0:
        raise ValueError("mutual information needs at least one sample")
    counts = np.zeros((arity, arity))
    np.add.at(counts, (samples[:, i], samples[:, j]), 1.0)
    return max(float(_mi_from_counts(counts, smoothing)), 0.0)


def mutual_information_matrix(samples, smoothing: float, arity: int = 2) -> np.ndarray:
    counts = _joint_counts(samples, arity)
    mi = np.maximum(_mi_from_counts(counts, smoothing), 0.0)
    mi = np.triu(mi, k=1)
    return mi + mi.T


@dataclass(frozen=True)
class DependencyTree:
    """Rooted spanning tree; ``parent[root] == -1`` and ``order`` is topological."""

    parent: tuple
    order: tuple

    @property
    def edges(self) -> set:
        return {frozenset((c, p)) for c, p in enumerate(self.parent) if p >= 0}


def _find(link: list, a: int) -> int:
    while link[a] != a:
        link[a] = link[link[a]]
        a = link[a]
    return a


def build_dependency_tree(mi: np.ndarray, root: int = 0) -> DependencyTree:
    """Maximum-weight spanning tree (Kruskal), ties going to lower-index edges."""
    mi = np.asarray(mi, dtype=float)
    n = mi.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    # lexsort: last key is primary
    ranked = np.lexsort((ju, iu, -mi[iu, ju]))
    link = list(range(n))
    adjacency = [[] for _ in range(n)]
    chosen = 0
    for e in ranked:
        a, b = int(iu[e]), int(ju[e])
        ra, rb = _find(link, a), _find(link, b)
        if ra == rb:
            continue
        link[rb] = ra
        adjacency[a].append(b)
        adjacency[b].append(a)
        chosen += 1
        if chosen == n - 1:
            break

    parent = [-1] * n
    order = [root]
    seen = {root}
    for node in order:
        for nxt in sorted(adjacency[node]):
            if nxt not in seen:
                seen.add(nxt)
                parent[nxt] = node
                order.append(nxt)
    return DependencyTree(tuple(parent), tuple(order))


@dataclass
class TreeModel:
    tree: DependencyTree
    root_marginal: np.ndarray
    conditionals: dict  # child -> (arity_parent, arity_child) table, rows sum to 1
    arity: int


def fit_tree_model(samples, smoothing: float, arity: int = 2, root: int = 0) -> TreeModel:
    """Chow-Liu tree plus smoothed root marginal and parent-child conditionals.

    ``smoothing`` is the pseudocount per cell of a 2x2 joint table. Wider
    tables share the same total prior mass (``4 * smoothing``), so the
    per-cell pseudocount is ``4 * smoothing / arity**2``; otherwise the prior
    would swamp a small retained set when variables have many values.
    """
    samples = np.asarray(samples, dtype=np.int64)
    mass = 4.0 * smoothing
    cell = mass / arity ** 2
    counts = _joint_counts(samples, arity)
    mi = np.maximum(_mi_from_counts(counts, cell), 0.0)
    mi = np.triu(mi, k=1)
    tree = build_dependency_tree(mi + mi.T, root=root)
    root_counts = np.bincount(samples[:, root], minlength=arity) + mass / arity
    conditionals = {}
    for child, par in enumerate(tree.parent):
        if par < 0:
            continue
        table = counts[par, child] + cell
        conditionals[child] = table / table.sum(axis=1, keepdims=True)
    return TreeModel(tree, root_counts / root_counts.sum(), conditionals, arity)


def _draw(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    cum = np.cumsum(probs, axis=-1)
    u = rng.random(probs.shape[0])[:, None] * cum[:, -1:]
    return np.minimum((u >= cum).sum(axis=-1), probs.shape[-1] - 1)


def sample_from_tree(tree: DependencyTree, root_marginal, conditionals, rng: np.random.Generator,
                     size: Optional[int] = None, return_probs: bool = False):
    """Ancestral sampling: the root from its marginal, then children given parents.

    Returns one vector when ``size`` is None, else a ``(size, n)`` array. With
    ``return_probs`` the per-position distributions each draw came from are
    returned too, shape ``(size, n, arity)``.
    """
    m = 1 if size is None else size
    n = len(tree.parent)
    root_marginal = np.asarray(root_marginal, dtype=float)
    arity = root_marginal.shape[0]
    out = np.zeros((m, n), dtype=np.int64)
    probs = np.zeros((m, n, arity)) if return_probs else None
    for node in tree.order:
        par = tree.parent[node]
        dist = np.broadcast_to(root_marginal, (m, arity)) if par < 0 else np.asarray(conditionals[node])[out[:, par]]
        out[:, node] = _draw(dist, rng)
        if return_probs:
            probs[:, node] = dist
    if size is None:
        out = out[0]
        probs = probs[0] if return_probs else None
    return (out, probs) if return_probs else out


def repair_permutation(values: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Turn a sampled value vector into a permutation.

    Scanning left to right, the first occurrence of each value is kept; a
    repeat is replaced by the still-missing value that its position's
    distribution ranks highest.
    """
    n = len(values)
    missing = set(range(n)) - set(int(v) for v in values)
    used = set()
    out = np.array(values, dtype=np.int64, copy=True)
    for pos in range(n):
        v = int(out[pos])
        if v in used:
            v = max(missing, key=lambda c: (probs[pos][c], -c))
            missing.discard(v)
            out[pos] = v
        used.add(v)
    return out


def mimic(problem: ProblemSpec, cfg: MimicConfig, rng: np.random.Generator,
          counter: Optional[EvalCounter] = None) -> RunRecord:
    cfg.validate()
    counter = counter if counter is not None else EvalCounter()
    started = time.perf_counter()
    tracker = BestTracker(problem)
    arity = problem.n if problem.kind == PERM else 2

    pop = np.array([random_state(problem, rng) for _ in range(cfg.pop_size)])
    scores = np.array([problem.sign * evaluate(problem, s, counter) for s in pop])
    best = int(np.argmax(scores))
    tracker.offer(pop[best], scores[best])

    attempts = 0
    for _ in range(cfg.max_iters):
        ranked = np.argsort(-scores, kind="stable")
        retained = pop[ranked[: cfg.keep]]
        model = fit_tree_model(retained, cfg.smoothing, arity)
        drawn, probs = sample_from_tree(model.tree, model.root_marginal, model.conditionals,
                                        rng, size=cfg.pop_size - 1, return_probs=True)
        if problem.kind == PERM:
            drawn = np.array([repair_permutation(v, p) for v, p in zip(drawn, probs)])
        elite_state, elite_score = pop[ranked[0]], scores[ranked[0]]
        new_scores = [problem.sign * evaluate(problem, s, counter) for s in drawn]
        pop = np.vstack([elite_state[None, :], drawn])
        scores = np.array([elite_score] + new_scores)
        best = int(np.argmax(scores))
        if tracker.offer(pop[best], scores[best]):
            attempts = 0
        else:
            attempts += 1
        tracker.tick()
        if attempts >= cfg.max_attempts:
            break

    elapsed = time.perf_counter() - started
    return tracker.record(cfg.name, config_params(cfg), counter, elapsed)
