"""Command-line entry point: ``activerank <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import dataio
from .estimators import ESTIMATORS, EmptyGraphError, ReducibleChainError, fit
from .experiments import DatasetError, run
from .model import InvalidArgumentError
from .records import ORACLES, ConfigError, ExperimentConfig, ExperimentResult
from .samplers import (
    BTOracle,
    NoiselessOracle,
    child_seed,
    make_rng,
    sample_by_sorting,
    sample_random_pairs,
)
from .synthetic import generate_instance, plackett_luce_rankings

log = logging.getLogger("activerank")

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_ESTIMATION = 4


def _ints(text: str) -> list[int]:
    return [int(float(x)) for x in text.split(",") if x.strip()]


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def write_summary_csv(result: ExperimentResult, path) -> None:
    """Plot-ready table: one row per axis value, ``<metric>_mean`` / ``<metric>_std`` columns."""
    names = list(result.metrics)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        header = [result.axis["name"]]
        for name in names:
            header += [f"{name}_mean", f"{name}_std", f"{name}_count"]
        writer.writerow(header)
        for t, x in enumerate(result.axis["values"]):
            row = [x]
            for name in names:
                m = result.metrics[name]
                row += [_fmt(m["mean"][t]), _fmt(m["std"][t]), m["count"][t]]
            writer.writerow(row)


def _fmt(x) -> str:
    return "" if x is None or (isinstance(x, float) and np.isnan(x)) else repr(float(x))


def _emit(result: ExperimentResult, out: str | None) -> None:
    if out is None:
        sys.stdout.write(dataio.dumps_results(result))
        return
    dataio.write_results(result, out)
    write_summary_csv(result, Path(out).with_suffix(".csv"))
    log.info("wrote %s", out)


def _experiment(kind: str, args: argparse.Namespace) -> int:
    config = ExperimentConfig(
        kind=kind,
        n=args.n,
        lambdas=getattr(args, "lam", [10.0]),
        budgets=getattr(args, "budgets", None) or [],
        realizations=args.realizations,
        seed=args.seed,
        strategy=getattr(args, "strategy", "both"),
        estimator=getattr(args, "estimator", "arc-ml"),
        oracle=args.oracle,
        input=getattr(args, "input", None),
        input_format=getattr(args, "in_format", None),
        output=args.out,
        pseudo_count=getattr(args, "pseudo_count", 0.0),
        budget_pseudo_count=getattr(args, "budget_pseudo_count", 0.01),
    )
    _emit(run(config, workers=args.workers), args.out)
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    n, lam = args.n[0], args.lam[0]
    instance = generate_instance(n, lam, make_rng(args.seed, 0))
    names = [f"i{k}" for k in range(n)]
    out = Path(args.out)
    if args.format == "rankings":
        lists = plackett_luce_rankings(instance.theta, args.lists, args.length, make_rng(args.seed, 1))
        dataio.write_rankings(out, lists, names)
    else:
        m = args.budgets[-1]
        if args.oracle == "noiseless":
            oracle = NoiselessOracle(instance)
        else:
            oracle = BTOracle(instance, make_rng(args.seed, 1))
        if args.strategy == "random":
            comparisons = sample_random_pairs(n, m, oracle, make_rng(args.seed, 2))
        else:
            comparisons = sample_by_sorting(n, m, oracle, child_seed(args.seed, 2))
        dataio.write_comparisons(out, comparisons, names)
    if args.truth_out:
        dataio.write_scores(args.truth_out, names, instance.pi,
                            {"true_theta": [repr(float(t)) for t in instance.theta]})
    return 0


def cmd_fit(args: argparse.Namespace) -> int:
    id_map, graph, _ = dataio.load_input(args.input, args.in_format)
    report = fit(graph, args.estimator, pseudo_count=args.pseudo_count, fast=args.method == "fast")
    if not report.converged:
        log.warning("estimate did not converge (residual %.3g after %d iterations)",
                    report.final_residual, report.iterations)
    names = sorted(id_map, key=id_map.get)
    dataio.write_scores(args.out if args.out else sys.stdout, names, report.pi)
    log.info("%s: %d items, %d outcomes, %d iterations, residual %.3g",
             report.estimator, graph.n, graph.num_outcomes, report.iterations, report.final_residual)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="activerank",
        description="Ranking from noisy pairwise comparisons under the Bradley-Terry model.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, budgets=True, many=False):
        p.add_argument("--n", type=_ints, default=[500],
                       help="number of items" + (" (comma list to sweep)" if many else ""))
        p.add_argument("--lambda", dest="lam", type=_floats, default=[10.0],
                       help="rate of the exponential strength gaps" + (" (comma list)" if many else ""))
        if budgets:
            p.add_argument("--budgets", type=_ints, default=[1000, 2000, 5000, 10000],
                           help="comma-separated, strictly increasing comparison budgets")
        p.add_argument("--realizations", type=int, default=20)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="result file (JSON); a .csv summary is written beside it")
        p.add_argument("--workers", type=int, default=1)

    def strategy_args(p):
        p.add_argument("--strategy", choices=["sorting", "random", "both"], default="both")
        p.add_argument("--estimator", choices=ESTIMATORS, default="arc-ml")
        p.add_argument("--budget-pseudo-count", type=float, default=0.01,
                       help="pseudo-count added to each directed count on compared pairs in per-budget fits")

    p = sub.add_parser("gen", help="generate a synthetic comparison or ranking file")
    p.add_argument("--n", type=_ints, default=[100])
    p.add_argument("--lambda", dest="lam", type=_floats, default=[10.0])
    p.add_argument("--budgets", type=_ints, default=[1000], help="number of comparisons (last value)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategy", choices=["sorting", "random"], default="random")
    p.add_argument("--oracle", choices=["bt-model", "noiseless"], default="bt-model")
    p.add_argument("--format", choices=["comparisons", "rankings"], default="comparisons")
    p.add_argument("--lists", type=int, default=5000, help="rankings: number of respondents")
    p.add_argument("--length", type=int, default=10, help="rankings: items per respondent")
    p.add_argument("--out", required=True)
    p.add_argument("--truth-out", default=None, help="write ground-truth scores as CSV")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("fit", help="estimate scores from a comparison or ranking file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--in-format", choices=["comparisons", "rankings"], default=None)
    p.add_argument("--estimator", choices=ESTIMATORS, default="arc-ml")
    p.add_argument("--pseudo-count", type=float, default=0.0)
    p.add_argument("--method", choices=["fast", "power"], default="fast",
                   help="fast: stationary/direct solves; power: plain power iteration")
    p.add_argument("--out", default=None, help="CSV output (default: stdout)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sim-displacement", help="displacement of one noisy Quicksort run")
    common(p, budgets=False, many=True)
    p.add_argument("--oracle", choices=["bt-model", "noiseless"], default="bt-model")
    p.set_defaults(func=lambda a: _experiment("displacement-sim", a))

    p = sub.add_parser("compare-strategies", help="sorting vs random pairs on synthetic models")
    common(p)
    strategy_args(p)
    p.add_argument("--oracle", choices=["bt-model", "noiseless"], default="bt-model")
    p.set_defaults(func=lambda a: _experiment("strategy-compare", a))

    p = sub.add_parser("dataset-run", help="sorting vs random pairs on a model fitted to real data")
    common(p)
    strategy_args(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--in-format", choices=["comparisons", "rankings"], default=None)
    p.add_argument("--oracle", choices=[o for o in ORACLES if o != "noiseless"], default="bt-model")
    p.add_argument("--pseudo-count", type=float, default=0.0,
                   help="pseudo-count for the ground-truth fit")
    p.set_defaults(func=lambda a: _experiment("dataset-run", a))
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ReducibleChainError, EmptyGraphError) as exc:
        print(f"activerank: estimation error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except (dataio.ParseError, DatasetError, OSError) as exc:
        print(f"activerank: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"activerank: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
