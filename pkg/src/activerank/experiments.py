"""Seeded experiment drivers: displacement simulation, strategy comparison, dataset runs."""

from __future__ import annotations

import logging
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Any

import numpy as np

from . import dataio
from .estimators import EmptyGraphError, ReducibleChainError, arc_fit, fit
from .metrics import avg_displacement, max_displacement, ranking_from_estimate, rel_pi_error
from .model import BTInstance, ComparisonGraph, Ranking
from .records import ConfigError, ExperimentConfig, ExperimentResult
from .samplers import (
    BTOracle,
    ComparisonLog,
    ComparisonOracle,
    NoiselessOracle,
    ReplayOracle,
    child_seed,
    make_rng,
    quicksort_rank,
    sample_by_sorting,
    sample_random_pairs,
)
from .synthetic import fit_lambda, generate_instance

log = logging.getLogger(__name__)

RATIO_DEFINITION = "avg_displacement.random / avg_displacement.sorting (>1 means sorting is better)"


class DatasetError(RuntimeError):
    pass


def _map(fn: Callable[[int], dict], count: int, workers: int) -> list[dict]:
    if workers <= 1:
        return [fn(r) for r in range(count)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def _aggregate(realizations: list[dict], names: list[str], length: int) -> dict[str, dict]:
    metrics = {}
    for name in names:
        values = np.array(
            [[np.nan if v is None else v for v in rec["series"][name]] for rec in realizations],
            dtype=np.float64,
        ).reshape(len(realizations), length)
        valid = ~np.isnan(values)
        count = valid.sum(axis=0)
        mean = np.full(length, np.nan)
        std = np.full(length, np.nan)
        for t in range(length):
            if count[t]:
                col = values[valid[:, t], t]
                mean[t] = col.mean()
                std[t] = col.std()
        metrics[name] = {"mean": mean.tolist(), "std": std.tolist(), "count": count.tolist()}
    return metrics


# -- displacement simulation -------------------------------------------------


def _sweep(config: ExperimentConfig) -> tuple[str, list[tuple[int, float]]]:
    if len(config.n) > 1:
        return "n", [(n, config.lambdas[0]) for n in config.n]
    return "lambda", [(config.n[0], lam) for lam in config.lambdas]


def _displacement_realization(config: ExperimentConfig, r: int) -> dict:
    _, points = _sweep(config)
    series: dict[str, list] = {"avg_displacement": [], "max_displacement": [], "comparisons": []}
    for a, (n, lam) in enumerate(points):
        instance = generate_instance(n, lam, make_rng(config.seed, a, r, 0))
        oracle = _oracle(config.oracle, instance, make_rng(config.seed, a, r, 1))
        rng = make_rng(config.seed, a, r, 2)
        result = quicksort_rank(rng.permutation(n), oracle, rng)
        sigma = Ranking.from_order(result.order)
        series["avg_displacement"].append(avg_displacement(sigma))
        series["max_displacement"].append(max_displacement(sigma))
        series["comparisons"].append(len(result.log))
    return {"index": r, "series": series}


def run_displacement_sim(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """One untruncated noisy Quicksort per realization and sweep point; records displacement."""
    config.validate()
    if config.kind != "displacement-sim":
        raise ConfigError("expected a displacement-sim config")
    if config.oracle == "empirical-replay":
        raise ConfigError("displacement simulation needs a bt-model or noiseless oracle")
    axis_name, points = _sweep(config)
    values = [n if axis_name == "n" else lam for n, lam in points]
    recs = _map(partial(_displacement_realization, config), config.realizations, workers)
    names = ["avg_displacement", "max_displacement", "comparisons"]
    return ExperimentResult(
        config,
        {"name": axis_name, "values": values},
        _aggregate(recs, names, len(points)),
        recs,
        {"instance_policy": "fresh instance per realization and sweep point"},
    )


# -- strategy comparison -----------------------------------------------------


def _oracle(kind: str, truth: BTInstance, rng: np.random.Generator,
            data: ComparisonGraph | None = None) -> ComparisonOracle:
    if kind == "bt-model":
        return BTOracle(truth, rng)
    if kind == "noiseless":
        return NoiselessOracle(truth)
    if kind == "empirical-replay":
        if data is None:
            raise ConfigError("empirical-replay oracle needs recorded data")
        return ReplayOracle(data, rng)
    raise ConfigError(f"unknown oracle {kind!r}")


STREAMS = {"sorting": 0, "random": 1}


def _strategies(config: ExperimentConfig) -> list[str]:
    return ["sorting", "random"] if config.strategy == "both" else [config.strategy]


def _collect(strategy: str, n: int, m: int, oracle: ComparisonOracle, config: ExperimentConfig,
             r: int) -> ComparisonLog:
    if strategy == "sorting":
        return sample_by_sorting(n, m, oracle, child_seed(config.seed, r, 2))
    return sample_random_pairs(n, m, oracle, make_rng(config.seed, r, 4))


def evaluate_log(
    log_: ComparisonLog,
    n: int,
    budgets,
    truth: BTInstance,
    estimator: str,
    pseudo_count: float,
) -> tuple[dict[str, list], list[int]]:
    """Fit ``estimator`` on each budget prefix of ``log_`` and score against ``truth``.

    Items are assumed labeled in true rank order. Budgets whose comparison
    graph admits no estimate become ``nan`` and are listed as missing.
    """
    series: dict[str, list] = {"avg_displacement": [], "max_displacement": [], "rel_pi_error": []}
    missing = []
    truth_pi = truth.pi
    for m in budgets:
        graph = log_.prefix(m).to_graph(n)
        try:
            if not graph.is_connected():
                raise ReducibleChainError("comparison graph is disconnected")
            report = fit(graph, estimator, pseudo_count=pseudo_count, fast=True)
        except (ReducibleChainError, EmptyGraphError):
            missing.append(int(m))
            for values in series.values():
                values.append(np.nan)
            continue
        sigma = ranking_from_estimate(report.pi)
        series["avg_displacement"].append(avg_displacement(sigma))
        series["max_displacement"].append(float(max_displacement(sigma)))
        series["rel_pi_error"].append(rel_pi_error(report.pi, truth_pi))
    return series, missing


def _compare_realization(
    config: ExperimentConfig, truth_of: Callable[[int], BTInstance],
    data: ComparisonGraph | None, r: int,
) -> dict:
    truth = truth_of(r)
    n = truth.n
    budgets = config.budgets
    series: dict[str, list] = {}
    missing: dict[str, list[int]] = {}
    for strategy in _strategies(config):
        stream = STREAMS[strategy]
        oracle = _oracle(config.oracle, truth, make_rng(config.seed, r, 1, stream), data)
        full = _collect(strategy, n, budgets[-1], oracle, config, r)
        values, miss = evaluate_log(full, n, budgets, truth, config.estimator,
                                    config.budget_pseudo_count)
        for name, vals in values.items():
            series[f"{name}.{strategy}"] = vals
        missing[strategy] = miss
    if config.strategy == "both":
        d_sort = np.asarray(series["avg_displacement.sorting"], dtype=float)
        d_rand = np.asarray(series["avg_displacement.random"], dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(d_sort > 0, d_rand / d_sort, np.nan)
        series["ratio"] = ratio.tolist()
    return {"index": r, "series": series, "missing": missing}


def _comparison_result(config, recs, metadata) -> ExperimentResult:
    names = list(recs[0]["series"])
    metadata = dict(metadata)
    metadata.update({
        "ratio_definition": RATIO_DEFINITION,
        "random_pairs": "uniform over unordered pairs, with replacement",
        "budgets_nested": True,
        "ml_solver": "arc-stationary" if config.estimator == "arc-ml" else "direct",
    })
    return ExperimentResult(
        config,
        {"name": "budget", "values": list(config.budgets)},
        _aggregate(recs, names, len(config.budgets)),
        recs,
        metadata,
    )


def _synthetic_truth(config: ExperimentConfig, r: int) -> BTInstance:
    return generate_instance(config.n[0], config.lambdas[0], make_rng(config.seed, r, 0))


def run_strategy_compare(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Sorting-based versus uniform-random comparison selection on synthetic instances."""
    config.validate()
    if config.kind != "strategy-compare":
        raise ConfigError("expected a strategy-compare config")
    if config.oracle == "empirical-replay":
        raise ConfigError("synthetic comparison needs a bt-model or noiseless oracle")
    fn = partial(_compare_realization, config, partial(_synthetic_truth, config), None)
    recs = _map(fn, config.realizations, workers)
    return _comparison_result(config, recs, {"instance_policy": "fresh instance per realization"})


# -- dataset experiments -----------------------------------------------------


def _fixed_truth(truth: BTInstance, r: int) -> BTInstance:
    return truth


def fit_ground_truth(graph: ComparisonGraph, pseudo_count: float = 0.0):
    """ML fit on all data; returns the report and ``new_index`` relabeling items by fitted rank."""
    try:
        report = arc_fit(graph, pseudo_count=pseudo_count, method="stationary")
    except ReducibleChainError as exc:
        raise DatasetError(
            f"cannot fit ground truth: {exc}. Rerun with --pseudo-count (e.g. 0.01)."
        ) from None
    order = ranking_from_estimate(report.pi).order
    new_index = np.empty(graph.n, dtype=np.int64)
    new_index[order] = np.arange(graph.n)
    return report, new_index


def run_dataset_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Strategy comparison on a model fitted to real data.

    With a ``bt-model`` oracle outcomes are drawn from the fitted model; with
    ``empirical-replay`` they are resampled from the recorded outcomes.
    """
    config.validate()
    if config.kind != "dataset-run":
        raise ConfigError("expected a dataset-run config")
    if config.oracle == "noiseless":
        raise ConfigError("dataset runs use a bt-model or empirical-replay oracle")
    id_map, graph, _ = dataio.load_input(config.input, config.input_format)
    if graph.n < 2:
        raise DatasetError("input contains fewer than two items")
    report, new_index = fit_ground_truth(graph, config.pseudo_count)
    theta = np.empty(graph.n)
    theta[new_index] = report.theta
    truth = BTInstance(theta)
    data = graph.relabel(new_index)
    names = sorted(id_map, key=lambda name: new_index[id_map[name]])
    fn = partial(_compare_realization, config, partial(_fixed_truth, truth), data)
    recs = _map(fn, config.realizations, workers)
    metadata: dict[str, Any] = {
        "items": graph.n,
        "outcomes": graph.num_outcomes,
        "ground_truth_converged": report.converged,
        "ground_truth_order": names,
        "fitted_lambda": fit_lambda(np.sort(theta)[::-1]) if np.unique(theta).size == theta.size else None,
    }
    return _comparison_result(config, recs, metadata)


RUNNERS = {
    "displacement-sim": run_displacement_sim,
    "strategy-compare": run_strategy_compare,
    "dataset-run": run_dataset_experiment,
}


def run(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    return RUNNERS[config.validate().kind](config, workers)
