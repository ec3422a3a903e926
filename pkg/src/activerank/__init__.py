"""Ranking from noisy pairwise comparisons under the Bradley-Terry model.

Estimators (Rank Centrality, its count-weighted variant, and the maximum
likelihood estimate via Adjusted Rank Centrality), comparison samplers
(repeated noisy Quicksort and uniform random pairs), quality metrics and
seeded experiment drivers.
"""

from .estimators import (
    EstimateReport,
    ReducibleChainError,
    TransitionMatrix,
    arc_fit,
    build_arc_chain,
    build_counts_chain,
    build_rc_chain,
    counts_centrality,
    log_likelihood,
    log_likelihood_grad,
    ml_residual,
    rank_centrality,
    stationary_distribution,
)
from .metrics import (
    avg_displacement,
    max_displacement,
    ranking_from_estimate,
    rc_bound_value,
    rel_pi_error,
    w_error,
)
from .model import (
    BTInstance,
    ComparisonGraph,
    GraphStats,
    InvalidArgumentError,
    Ranking,
    graph_stats,
    prob_win,
)
from .samplers import (
    BTOracle,
    ComparisonLog,
    NoiselessOracle,
    ReplayOracle,
    child_seed,
    make_rng,
    quicksort_rank,
    sample_by_sorting,
    sample_random_pairs,
)
from .synthetic import fit_lambda, generate_instance

__version__ = "0.1.0"
