"""Independent reference computations used as test oracles.

Nothing here calls into the estimators under test.
"""

from __future__ import annotations

import math
from fractions import Fraction

GOLDEN = (math.sqrt(5) - 1) / 2


def _pair_terms(pairs, i):
    """Pairs touching item ``i`` as ``(other, wins_i, wins_other)``."""
    out = []
    for (a, b), (wa, wb) in pairs:
        if a == i:
            out.append((b, wa, wb))
        elif b == i:
            out.append((a, wb, wa))
    return out


def _local_ll(theta, i, x, terms):
    # log-likelihood restricted to the terms that depend on theta_i = x
    total = 0.0
    for j, wi, wj in terms:
        d = x - theta[j]
        # wi * log sigmoid(d) + wj * log sigmoid(-d), computed stably
        total -= wi * _log1pexp(-d) + wj * _log1pexp(d)
    return total


def _log1pexp(x):
    return x + math.log1p(math.exp(-x)) if x > 0 else math.log1p(math.exp(x))


def _golden_max(f, lo, hi, tol):
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (a + b) / 2


def brute_force_ml(n, pairs, weighting="counts", tol=1e-11, max_sweeps=5000):
    """Maximize the Bradley-Terry likelihood by coordinate-wise golden-section search.

    ``pairs`` is a list of ``((lo, hi), (wins_lo, wins_hi))``. Works in
    strength space with ``theta_0`` pinned at 0; each coordinate is refined
    on a bracket that shrinks with the last move. Returns ``pi``.
    """
    if weighting == "ratios":
        pairs = [((a, b), (wa / (wa + wb), wb / (wa + wb))) for (a, b), (wa, wb) in pairs]
    theta = [0.0] * n
    terms = [_pair_terms(pairs, i) for i in range(n)]
    width = 8.0
    for _ in range(max_sweeps):
        biggest = 0.0
        for i in range(1, n):
            x0 = theta[i]
            f = lambda x, i=i: _local_ll(theta, i, x, terms[i])  # noqa: E731
            x = _golden_max(f, x0 - width, x0 + width, tol)
            theta[i] = x
            biggest = max(biggest, abs(x - x0))
        if biggest < tol:
            break
        width = max(min(8.0, 4 * biggest), 1e-6)
    m = max(theta)
    w = [math.exp(t - m) for t in theta]
    s = sum(w)
    return [x / s for x in w]


def quicksort_expected_comparisons(n: int) -> Fraction:
    """Exact mean comparison count of randomized Quicksort, via the recurrence
    ``C(n) = n - 1 + (2/n) * sum_{k<n} C(k)``."""
    c = [Fraction(0), Fraction(0)]
    prefix = Fraction(0)
    for size in range(2, n + 1):
        prefix += c[size - 1]
        c.append(size - 1 + Fraction(2, size) * prefix)
    return c[n]


def quicksort_comparison_variance_bound(n: int) -> float:
    # Var(C_n) ~ (7 - 2 pi^2 / 3) n^2 for large n
    return (7 - 2 * math.pi ** 2 / 3) * n * n


def erlang_wrong_outcome_mean(lam: float, k: int, grid: int = 200_000) -> float:
    """E[1 / (1 + exp(D))] for D ~ Erlang(k, lam), by midpoint quadrature."""
    upper = (k + 40 * math.sqrt(k)) / lam + 50 / lam
    h = upper / grid
    total = 0.0
    log_norm = k * math.log(lam) - math.lgamma(k)
    for s in range(grid):
        t = (s + 0.5) * h
        dens = math.exp(log_norm + (k - 1) * math.log(t) - lam * t)
        total += dens / (1 + math.exp(t)) if t < 700 else 0.0
    return total * h
