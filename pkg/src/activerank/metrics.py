"""Ranking and parameter-estimate quality measures."""

from __future__ import annotations

import math
import warnings

import numpy as np
import numpy.typing as npt

from .model import GraphStats, InvalidArgumentError, Ranking


def _sigma(sigma: Ranking | npt.ArrayLike) -> np.ndarray:
    return sigma.sigma if isinstance(sigma, Ranking) else Ranking(np.asarray(sigma)).sigma


def ranking_from_estimate(pi: npt.ArrayLike) -> Ranking:
    """Rank items by decreasing score; equal scores are ordered by item index."""
    pi = np.asarray(pi, dtype=np.float64)
    order = np.lexsort((np.arange(pi.size), -pi))
    return Ranking.from_order(order)


def avg_displacement(sigma: Ranking | npt.ArrayLike) -> float:
    """Mean of ``|sigma(i) - i|``: the Spearman footrule to the identity, divided by ``n``."""
    s = _sigma(sigma)
    return float(np.abs(s - np.arange(s.size)).mean())


def max_displacement(sigma: Ranking | npt.ArrayLike) -> int:
    s = _sigma(sigma)
    return int(np.abs(s - np.arange(s.size)).max())


def rel_pi_error(pi_hat: npt.ArrayLike, pi_star: npt.ArrayLike) -> float:
    pi_hat = np.asarray(pi_hat, dtype=np.float64)
    pi_star = np.asarray(pi_star, dtype=np.float64)
    if pi_hat.shape != pi_star.shape:
        raise InvalidArgumentError("pi_hat and pi_star must have equal length")
    denom = np.linalg.norm(pi_star)
    if denom == 0:
        raise InvalidArgumentError("pi_star must be nonzero")
    return float(np.linalg.norm(pi_hat - pi_star) / denom)


def canonical_weights(w: npt.ArrayLike) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    return w / w.max()


def w_error(w_hat: npt.ArrayLike, w_star: npt.ArrayLike) -> float:
    """L2 distance between weight vectors after scaling both to ``max w = 1``."""
    w_hat, w_star = np.asarray(w_hat, dtype=np.float64), np.asarray(w_star, dtype=np.float64)
    if w_hat.shape != w_star.shape:
        raise InvalidArgumentError("w_hat and w_star must have equal length")
    return float(np.linalg.norm(canonical_weights(w_hat) - canonical_weights(w_star)))


def rc_bound_value(stats: GraphStats, b: float, k: int, n: int) -> float:
    """Variable part of the Rank Centrality error bound, up to an unspecified constant.

    ``b**2.5 * kappa / gamma * sqrt(log n / (k d_max))``. Returns ``inf``
    (with a warning) when the spectral gap is zero or unavailable.
    """
    if k < 1:
        raise InvalidArgumentError("k must be >= 1")
    if stats.gamma is None or stats.gamma <= 0:
        warnings.warn("spectral gap is zero or unavailable; bound is vacuous", RuntimeWarning,
                      stacklevel=2)
        return math.inf
    return b**2.5 * stats.kappa / stats.gamma * math.sqrt(math.log(n) / (k * stats.d_max))


def max_avg_displacement(n: int) -> float:
    """Largest possible average displacement over permutations of ``n`` items."""
    return n / 2 if n % 2 == 0 else (n * n - 1) / (2 * n)


def budget_to_reach(budgets, curve, target: float) -> float | None:
    """First budget at which a decreasing curve reaches ``target``, linearly interpolated."""
    budgets = np.asarray(budgets, dtype=np.float64)
    curve = np.asarray(curve, dtype=np.float64)
    prev_b, prev_c = None, None
    for b, c in zip(budgets, curve):
        if np.isnan(c):
            continue
        if c <= target:
            if prev_b is None or prev_c == c:
                return float(b)
            return float(prev_b + (prev_c - target) * (b - prev_b) / (prev_c - c))
        prev_b, prev_c = b, c
    return None
