"""Comparison oracles and pair-selection strategies (repeated noisy Quicksort, uniform pairs)."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
from scipy.special import expit

from .model import BTInstance, ComparisonGraph, IntArray, InvalidArgumentError

SeedLike = int | np.random.SeedSequence


def child_seed(seed: SeedLike, *keys: int) -> np.random.SeedSequence:
    """Deterministic child of ``seed`` addressed by ``keys`` (independent of spawn order)."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + keys)
    return np.random.SeedSequence(int(seed), spawn_key=keys)


def make_rng(seed: SeedLike, *keys: int) -> np.random.Generator:
    return np.random.default_rng(child_seed(seed, *keys))


class ComparisonOracle:
    """Answers "is ``i`` preferred over ``j``?" queries.

    Subclasses implement :meth:`prefers`, a vectorized query over parallel
    arrays. A batch of size ``k`` consumes randomness exactly like ``k``
    consecutive scalar calls, so truncating a batch never changes earlier answers.
    """

    kind = "abstract"

    def prefers(self, first: IntArray, second: IntArray) -> np.ndarray:
        raise NotImplementedError

    def compare(self, i: int, j: int) -> int:
        """Return the winner of one comparison between ``i`` and ``j``."""
        won = self.prefers(np.array([i]), np.array([j]))[0]
        return i if won else j


class BTOracle(ComparisonOracle):
    """Independent Bradley-Terry draws at fixed strengths."""

    kind = "bt-model"

    def __init__(self, theta: BTInstance | npt.ArrayLike, rng: np.random.Generator):
        self.theta = theta.theta if isinstance(theta, BTInstance) else np.asarray(theta, float)
        self.rng = rng

    def prefers(self, first, second):
        return self.rng.random(len(first)) < expit(self.theta[first] - self.theta[second])


class NoiselessOracle(ComparisonOracle):
    """The stronger item always wins; equal strengths go to the lower index."""

    kind = "noiseless"

    def __init__(self, theta: BTInstance | npt.ArrayLike):
        self.theta = theta.theta if isinstance(theta, BTInstance) else np.asarray(theta, float)

    def prefers(self, first, second):
        tf, ts = self.theta[first], self.theta[second]
        return (tf > ts) | ((tf == ts) & (np.asarray(first) < np.asarray(second)))


class ReplayOracle(ComparisonOracle):
    """Resamples recorded outcomes.

    A query on ``(i, j)`` returns one of the outcomes recorded for that pair,
    chosen uniformly at random; unseen pairs are a fair coin flip.
    """

    kind = "empirical-replay"

    def __init__(self, graph: ComparisonGraph, rng: np.random.Generator):
        p = graph.pair_arrays()
        self.n = graph.n
        self._keys = p.lo * graph.n + p.hi
        self._p_lo = p.wins_lo / (p.wins_lo + p.wins_hi)
        self.rng = rng

    def prefers(self, first, second):
        first = np.asarray(first, dtype=np.int64)
        second = np.asarray(second, dtype=np.int64)
        lo = np.minimum(first, second)
        keys = lo * self.n + np.maximum(first, second)
        p_lo = np.full(first.size, 0.5)
        if self._keys.size:
            pos = np.minimum(np.searchsorted(self._keys, keys), self._keys.size - 1)
            hit = self._keys[pos] == keys
            p_lo[hit] = self._p_lo[pos[hit]]
        p_first = np.where(first == lo, p_lo, 1.0 - p_lo)
        return self.rng.random(first.size) < p_first


@dataclass(frozen=True)
class ComparisonLog:
    """Ordered comparison triples ``(i, j, winner)``; ``run`` tags the sort run of each entry."""

    i: IntArray
    j: IntArray
    winner: IntArray
    run: IntArray | None = None

    def __post_init__(self) -> None:
        arrays = {}
        for name in ("i", "j", "winner"):
            arr = np.array(getattr(self, name), dtype=np.int64).reshape(-1)
            arr.setflags(write=False)
            arrays[name] = arr
        i, j, w = arrays["i"], arrays["j"], arrays["winner"]
        if not (i.size == j.size == w.size):
            raise InvalidArgumentError("log columns must have equal length")
        if np.any(i == j):
            raise InvalidArgumentError("log contains a self-comparison")
        if np.any((w != i) & (w != j)):
            raise InvalidArgumentError("winner must be one of the compared items")
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)
        if self.run is not None:
            run = np.array(self.run, dtype=np.int64).reshape(-1)
            run.setflags(write=False)
            object.__setattr__(self, "run", run)

    @classmethod
    def empty(cls) -> ComparisonLog:
        return cls(np.empty(0), np.empty(0), np.empty(0))

    @classmethod
    def from_triples(cls, triples: Sequence[tuple[int, int, int]]) -> ComparisonLog:
        if not triples:
            return cls.empty()
        arr = np.asarray(triples, dtype=np.int64)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2])

    @classmethod
    def concat(cls, logs: Sequence[ComparisonLog]) -> ComparisonLog:
        if not logs:
            return cls.empty()
        run = None
        if all(log.run is not None for log in logs):
            run = np.concatenate([log.run for log in logs])
        return cls(
            np.concatenate([log.i for log in logs]),
            np.concatenate([log.j for log in logs]),
            np.concatenate([log.winner for log in logs]),
            run,
        )

    def __len__(self) -> int:
        return int(self.i.size)

    @property
    def loser(self) -> IntArray:
        return np.where(self.winner == self.i, self.j, self.i)

    def prefix(self, m: int) -> ComparisonLog:
        return ComparisonLog(self.i[:m], self.j[:m], self.winner[:m],
                             None if self.run is None else self.run[:m])

    def triples(self) -> list[tuple[int, int, int]]:
        return list(zip(self.i.tolist(), self.j.tolist(), self.winner.tolist()))

    def to_graph(self, n: int) -> ComparisonGraph:
        return ComparisonGraph.from_outcomes(n, self.winner, self.loser)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ComparisonLog):
            return NotImplemented
        return (
            np.array_equal(self.i, other.i)
            and np.array_equal(self.j, other.j)
            and np.array_equal(self.winner, other.winner)
        )


class QuicksortResult(NamedTuple):
    order: list[int]
    log: ComparisonLog
    truncated: bool


def quicksort_rank(
    items: Sequence[int],
    oracle: ComparisonOracle,
    rng: np.random.Generator,
    budget: int | None = None,
) -> QuicksortResult:
    """Randomized Quicksort driven by a (possibly noisy) oracle.

    Items judged preferred over the pivot go left, so ``order`` is best first.
    Each partition compares every other item of the subset against a
    uniformly drawn pivot; subsets are processed depth first, left before
    right. When ``budget`` comparisons have been made the sort stops at that
    exact call, ``truncated`` is set, and ``order`` lists the placed items
    followed by the unresolved ones in their current arrangement.
    """
    items = [int(x) for x in items]
    if len(set(items)) != len(items):
        raise InvalidArgumentError("items must be distinct")
    if budget is not None and budget < 0:
        raise InvalidArgumentError("budget must be non-negative")
    remaining = np.inf if budget is None else budget

    order: list[int] = []
    firsts: list[np.ndarray] = []
    pivots: list[np.ndarray] = []
    wins: list[np.ndarray] = []
    # Stack entries: an int is a placed pivot, an array is a subset still to sort.
    stack: list[int | np.ndarray] = [np.asarray(items, dtype=np.int64)]
    truncated = False
    while stack:
        top = stack.pop()
        if isinstance(top, int):
            order.append(top)
            continue
        if top.size < 2:
            order.extend(top.tolist())
            continue
        if remaining <= 0:
            stack.append(top)
            truncated = True
            break
        k = int(rng.integers(top.size))
        pivot = int(top[k])
        others = np.delete(top, k)
        if others.size > remaining:
            others = others[: int(remaining)]
            truncated = True
        won = oracle.prefers(others, np.full(others.size, pivot))
        firsts.append(others)
        pivots.append(np.full(others.size, pivot))
        wins.append(won)
        remaining -= others.size
        if truncated:
            stack.append(top)
            break
        stack.append(others[~won])
        stack.append(pivot)
        stack.append(others[won])
    if truncated:
        for rest in reversed(stack):
            order.extend([rest] if isinstance(rest, int) else rest.tolist())

    if firsts:
        i = np.concatenate(firsts)
        j = np.concatenate(pivots)
        winner = np.where(np.concatenate(wins), i, j)
        log = ComparisonLog(i, j, winner)
    else:
        log = ComparisonLog.empty()
    return QuicksortResult(order, log, truncated)


def sample_by_sorting(
    n: int, m: int, oracle: ComparisonOracle, seed: SeedLike
) -> ComparisonLog:
    """Exactly ``m`` comparisons collected by repeated Quicksort runs over all items.

    Run ``r`` shuffles the items and draws pivots from a generator derived
    from ``(seed, r)``; the sorted outputs are discarded and the last run is
    truncated at the budget. The log for budget ``m`` is a prefix of the
    log for any larger budget with the same seed and oracle state.
    """
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    if m < 1:
        raise InvalidArgumentError("m must be >= 1")
    logs = []
    total = 0
    run = 0
    while total < m:
        rng = make_rng(seed, run)
        items = rng.permutation(n)
        result = quicksort_rank(items, oracle, rng, budget=m - total)
        log = result.log
        logs.append(ComparisonLog(log.i, log.j, log.winner, np.full(len(log), run)))
        total += len(log)
        run += 1
    return ComparisonLog.concat(logs)


def sample_random_pairs(
    n: int, m: int, oracle: ComparisonOracle, rng: np.random.Generator
) -> ComparisonLog:
    """``m`` pairs drawn uniformly (with replacement) among the ``n(n-1)/2`` unordered pairs."""
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    if m < 1:
        raise InvalidArgumentError("m must be >= 1")
    i = rng.integers(0, n, size=m)
    j = rng.integers(0, n - 1, size=m)
    j = j + (j >= i)
    won = oracle.prefers(i, j)
    return ComparisonLog(i, j, np.where(won, i, j))
