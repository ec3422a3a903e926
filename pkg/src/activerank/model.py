"""Bradley-Terry parameters, comparison counts and rankings."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.special import expit, logsumexp

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]

GAMMA_MAX_N = 2000


class InvalidArgumentError(ValueError):
    """Raised on malformed inputs (bad indices, self-comparisons, bad shapes)."""


def prob_win(theta_i: float, theta_j: float) -> float:
    """Probability that item ``i`` is preferred over item ``j``.

    Equals ``w_i / (w_i + w_j)`` with ``w = exp(theta)``; evaluated as a
    logistic function of the strength difference so it never overflows.
    """
    return float(expit(theta_i - theta_j))


def _readonly(x: npt.ArrayLike, dtype=np.float64) -> np.ndarray:
    arr = np.array(x, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BTInstance:
    """Bradley-Terry strengths for items ``0..n-1``.

    ``theta`` is stored as given; the canonical views shift it so that
    ``min(theta) == 0`` and scale weights so that ``max(w) == 1``.
    """

    theta: FloatArray

    def __post_init__(self) -> None:
        theta = _readonly(self.theta)
        if theta.ndim != 1 or theta.size < 1:
            raise InvalidArgumentError("theta must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(theta)):
            raise InvalidArgumentError("theta must be finite")
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_weights(cls, w: npt.ArrayLike) -> BTInstance:
        w = np.asarray(w, dtype=np.float64)
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise InvalidArgumentError("weights must be finite and strictly positive")
        return cls(np.log(w))

    @classmethod
    def from_pi(cls, pi: npt.ArrayLike) -> BTInstance:
        return cls.from_weights(pi)

    @property
    def n(self) -> int:
        return int(self.theta.size)

    @property
    def canonical_theta(self) -> FloatArray:
        return self.theta - self.theta.min()

    @property
    def weights(self) -> FloatArray:
        """Weights scaled into ``[1/b, 1]``.

        Entries may underflow to zero when ``log b`` exceeds ~700.
        """
        return np.exp(self.theta - self.theta.max())

    @property
    def pi(self) -> FloatArray:
        return np.exp(self.theta - logsumexp(self.theta))

    @property
    def log_dynamic_range(self) -> float:
        return float(self.theta.max() - self.theta.min())

    @property
    def dynamic_range(self) -> float:
        """``b = max_ij w_i / w_j``; ``inf`` if it overflows."""
        with np.errstate(over="ignore"):
            return float(np.exp(self.log_dynamic_range))

    def prob(self, i: int, j: int) -> float:
        return prob_win(self.theta[i], self.theta[j])

    def true_order(self) -> IntArray:
        """Items sorted by decreasing strength, ties by index."""
        return np.lexsort((np.arange(self.n), -self.theta))


@dataclass(frozen=True, eq=False)
class Ranking:
    """``sigma[i]`` is the 0-based rank of item ``i`` (0 = best)."""

    sigma: IntArray

    def __post_init__(self) -> None:
        sigma = _readonly(self.sigma, dtype=np.int64)
        n = sigma.size
        if sigma.ndim != 1 or not np.array_equal(np.sort(sigma), np.arange(n)):
            raise InvalidArgumentError("sigma must be a permutation of 0..n-1")
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def from_order(cls, order: Sequence[int]) -> Ranking:
        """Build from a best-first list of items."""
        order = np.asarray(order, dtype=np.int64)
        sigma = np.empty_like(order)
        sigma[order] = np.arange(order.size)
        return cls(sigma)

    @property
    def n(self) -> int:
        return int(self.sigma.size)

    @property
    def order(self) -> IntArray:
        return np.argsort(self.sigma)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ranking):
            return NotImplemented
        return np.array_equal(self.sigma, other.sigma)

    __hash__ = None


class PairArrays(NamedTuple):
    """Edge list of a comparison graph, one row per compared pair ``lo < hi``."""

    lo: IntArray
    hi: IntArray
    wins_lo: FloatArray
    wins_hi: FloatArray


@dataclass
class ComparisonGraph:
    """Accumulated pairwise outcomes over ``n`` items.

    Counts are stored per unordered pair ``(lo, hi)`` as ``[wins_lo, wins_hi]``.
    In the usual notation ``A[i, j]`` is the number of times ``j`` was
    preferred over ``i``, so ``A[lo, hi] = wins_hi`` and ``A[hi, lo] = wins_lo``.
    """

    n: int
    _pairs: dict[tuple[int, int], list[int]] = field(default_factory=dict, repr=False)
    _cache: PairArrays | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise InvalidArgumentError("n must be non-negative")

    def _check(self, i: int, j: int) -> None:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise InvalidArgumentError(f"item index out of range: ({i}, {j}) for n={self.n}")
        if i == j:
            raise InvalidArgumentError(f"item {i} cannot be compared with itself")

    def record_outcome(self, winner: int, loser: int, count: int = 1) -> ComparisonGraph:
        winner, loser = int(winner), int(loser)
        self._check(winner, loser)
        key = (min(winner, loser), max(winner, loser))
        counts = self._pairs.setdefault(key, [0, 0])
        counts[0 if winner == key[0] else 1] += count
        self._cache = None
        return self

    @classmethod
    def from_outcomes(cls, n: int, winners: npt.ArrayLike, losers: npt.ArrayLike) -> ComparisonGraph:
        """Vectorized bulk construction from parallel winner/loser arrays."""
        winners = np.asarray(winners, dtype=np.int64)
        losers = np.asarray(losers, dtype=np.int64)
        if winners.shape != losers.shape:
            raise InvalidArgumentError("winners and losers must have equal length")
        graph = cls(n)
        if winners.size == 0:
            return graph
        if winners.min() < 0 or losers.min() < 0 or max(winners.max(), losers.max()) >= n:
            raise InvalidArgumentError("item index out of range")
        if np.any(winners == losers):
            raise InvalidArgumentError("self-comparison in outcomes")
        lo = np.minimum(winners, losers)
        hi = np.maximum(winners, losers)
        keys, inverse = np.unique(lo * n + hi, return_inverse=True)
        wins_lo = np.bincount(inverse, weights=(winners == lo), minlength=keys.size)
        total = np.bincount(inverse, minlength=keys.size)
        for key, wl, k in zip(keys.tolist(), wins_lo.astype(np.int64).tolist(), total.tolist()):
            graph._pairs[divmod(key, n)] = [wl, k - wl]
        return graph

    def copy(self) -> ComparisonGraph:
        return ComparisonGraph(self.n, {key: list(v) for key, v in self._pairs.items()})

    def k(self, i: int, j: int) -> int:
        self._check(i, j)
        return sum(self._pairs.get((min(i, j), max(i, j)), (0, 0)))

    def A(self, i: int, j: int) -> int:
        """Number of outcomes where ``j`` was preferred over ``i``."""
        self._check(i, j)
        counts = self._pairs.get((min(i, j), max(i, j)))
        if counts is None:
            return 0
        return counts[1] if i < j else counts[0]

    def a(self, i: int, j: int) -> float:
        """Fraction of the ``(i, j)`` comparisons won by ``j``; 0 if never compared."""
        k = self.k(i, j)
        return self.A(i, j) / k if k else 0.0

    @property
    def num_edges(self) -> int:
        return len(self._pairs)

    @property
    def num_outcomes(self) -> int:
        return sum(sum(v) for v in self._pairs.values())

    def pairs(self) -> Iterable[tuple[tuple[int, int], tuple[int, int]]]:
        for key in sorted(self._pairs):
            yield key, tuple(self._pairs[key])

    def pair_arrays(self) -> PairArrays:
        if self._cache is None:
            keys = sorted(self._pairs)
            counts = np.array([self._pairs[key] for key in keys], dtype=np.float64).reshape(-1, 2)
            idx = np.array(keys, dtype=np.int64).reshape(-1, 2)
            self._cache = PairArrays(idx[:, 0], idx[:, 1], counts[:, 0], counts[:, 1])
        return self._cache

    def degrees(self) -> IntArray:
        p = self.pair_arrays()
        return np.bincount(p.lo, minlength=self.n) + np.bincount(p.hi, minlength=self.n)

    def neighbors(self, i: int) -> list[int]:
        return sorted(
            [hi for (lo, hi) in self._pairs if lo == i] + [lo for (lo, hi) in self._pairs if hi == i]
        )

    def adjacency(self):
        """Sparse symmetric 0/1 adjacency matrix of the comparison graph."""
        p = self.pair_arrays()
        ones = np.ones(2 * p.lo.size)
        return coo_matrix(
            (ones, (np.r_[p.lo, p.hi], np.r_[p.hi, p.lo])), shape=(self.n, self.n)
        ).tocsr()

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        ncomp, _ = connected_components(self.adjacency(), directed=False)
        return ncomp == 1

    def relabel(self, new_index: npt.ArrayLike) -> ComparisonGraph:
        """Return a graph where item ``i`` becomes ``new_index[i]``."""
        new_index = np.asarray(new_index, dtype=np.int64)
        out = ComparisonGraph(self.n)
        for (lo, hi), (wl, wh) in self._pairs.items():
            a, b = int(new_index[lo]), int(new_index[hi])
            key = (min(a, b), max(a, b))
            out._pairs[key] = [wl, wh] if a < b else [wh, wl]
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ComparisonGraph):
            return NotImplemented
        return self.n == other.n and self._pairs == other._pairs


@dataclass(frozen=True)
class GraphStats:
    d_min: int
    d_max: int
    kappa: float
    gamma: float | None
    connected: bool


def graph_stats(graph: ComparisonGraph) -> GraphStats:
    """Degree extremes, ``kappa = d_max / d_min`` and the spectral gap of ``D^-1 B``.

    ``gamma`` is ``1 - lambda_2`` where ``lambda_2`` is the second largest
    eigenvalue of the unbiased random walk. It is ``None`` above
    ``GAMMA_MAX_N`` items and ``0.0`` when the graph is disconnected.
    """
    if graph.num_edges == 0:
        raise InvalidArgumentError("graph has no compared pairs")
    deg = graph.degrees()
    d_min, d_max = int(deg.min()), int(deg.max())
    kappa = d_max / d_min if d_min > 0 else float("inf")
    connected = graph.is_connected()
    gamma: float | None
    if not connected:
        gamma = 0.0
    elif graph.n > GAMMA_MAX_N:
        gamma = None
    else:
        # D^-1 B is similar to the symmetric D^-1/2 B D^-1/2, whose spectrum is real.
        B = graph.adjacency().toarray()
        s = 1.0 / np.sqrt(deg)
        eig = np.linalg.eigvalsh(s[:, None] * B * s[None, :])
        gamma = float(1.0 - eig[-2]) if graph.n > 1 else 1.0
    return GraphStats(d_min, d_max, kappa, gamma, connected)
