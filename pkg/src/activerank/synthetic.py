"""Ground-truth instances whose strength gaps are i.i.d. exponential."""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

from .model import BTInstance, InvalidArgumentError


def generate_instance(n: int, lam: float, rng: np.random.Generator) -> BTInstance:
    """Strengths decreasing in item index with ``theta_i - theta_{i+1} ~ Exp(lam)``.

    The weakest item is anchored at ``theta = 0``. Gaps are drawn by inverse
    CDF from the generator's uniforms.
    """
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    if not lam > 0:
        raise InvalidArgumentError("lambda must be positive")
    u = rng.random(n - 1)
    gaps = -np.log1p(-u) / lam
    theta = np.zeros(n)
    theta[:-1] = np.cumsum(gaps[::-1])[::-1]
    return BTInstance(theta)


def fit_lambda(theta: npt.ArrayLike) -> float:
    """ML rate of i.i.d. exponential gaps: ``(n - 1) / (theta_1 - theta_n)``."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.size < 2:
        raise InvalidArgumentError("need at least two strengths")
    if np.any(np.diff(theta) >= 0):
        raise InvalidArgumentError("theta must be strictly decreasing")
    span = theta[0] - theta[-1]
    return float((theta.size - 1) / span)


def plackett_luce_rankings(
    theta: npt.ArrayLike, num_lists: int, length: int, rng: np.random.Generator
) -> np.ndarray:
    """Sample ``num_lists`` strict orders over random ``length``-subsets of the items.

    Each order is a Plackett-Luce draw (Gumbel-perturbed strengths sorted in
    decreasing order), so its pairwise marginals follow the Bradley-Terry model.
    Used to build sushi-shaped stand-in data.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if not 2 <= length <= theta.size:
        raise InvalidArgumentError("length must be in [2, n]")
    out = np.empty((num_lists, length), dtype=np.int64)
    for r in range(num_lists):
        subset = rng.choice(theta.size, size=length, replace=False)
        noisy = theta[subset] + rng.gumbel(size=length)
        out[r] = subset[np.argsort(-noisy, kind="stable")]
    return out
