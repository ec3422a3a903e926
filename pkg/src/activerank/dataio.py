"""Reading comparison and ranking files, writing estimates and experiment records."""

from __future__ import annotations

import csv
import json
from contextlib import contextmanager
from importlib import resources
from itertools import combinations
from os import PathLike
from pathlib import Path

import jsonschema
import numpy as np

from .model import ComparisonGraph
from .records import ExperimentResult
from .samplers import ComparisonLog

COMPARISON_HEADER = ("winner", "loser")


class ParseError(ValueError):
    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


class ResultsSchemaError(ValueError):
    pass


def _lines(path):
    with open(path, encoding="utf-8", newline="") as f:
        for lineno, line in enumerate(f, start=1):
            yield lineno, line.rstrip("\n").rstrip("\r")


def _index(id_map: dict[str, int], name: str) -> int:
    idx = id_map.get(name)
    if idx is None:
        idx = id_map[name] = len(id_map)
    return idx


def load_comparisons(
    path: str | PathLike,
) -> tuple[dict[str, int], ComparisonGraph, ComparisonLog]:
    """Parse a ``winner,loser`` file.

    Ids get dense indices in order of first appearance. The log keeps the
    file order, with each outcome stored as ``(winner, loser, winner)``.
    """
    id_map: dict[str, int] = {}
    winners: list[int] = []
    losers: list[int] = []
    first = True
    for lineno, line in _lines(path):
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(",")]
        if first and tuple(fields) == COMPARISON_HEADER:
            first = False
            continue
        first = False
        if len(fields) != 2:
            raise ParseError(path, lineno, f"expected 2 comma-separated fields, got {len(fields)}")
        w, l = fields
        if not w or not l:
            raise ParseError(path, lineno, "empty item id")
        if w == l:
            raise ParseError(path, lineno, f"item {w!r} compared with itself")
        winners.append(_index(id_map, w))
        losers.append(_index(id_map, l))
    graph = ComparisonGraph.from_outcomes(len(id_map), winners, losers)
    log = ComparisonLog(winners, losers, winners)
    return id_map, graph, log


def decompose_rankings(
    path: str | PathLike, id_map: dict[str, int] | None = None
) -> ComparisonLog:
    """Split each best-first ranking line into all of its pairwise outcomes.

    A line of ``L`` items yields ``L(L-1)/2`` outcomes in lexicographic
    position order, the earlier item winning. New ids are added to
    ``id_map`` (if given) in order of first appearance.
    """
    if id_map is None:
        id_map = {}
    winners: list[int] = []
    losers: list[int] = []
    for lineno, line in _lines(path):
        ids = line.split()
        if not ids:
            continue
        if len(ids) < 2:
            raise ParseError(path, lineno, "a ranking needs at least two items")
        if len(set(ids)) != len(ids):
            raise ParseError(path, lineno, "duplicate item id in ranking")
        idx = [_index(id_map, name) for name in ids]
        for a, b in combinations(idx, 2):
            winners.append(a)
            losers.append(b)
    return ComparisonLog(winners, losers, winners)


def load_rankings(path: str | PathLike) -> tuple[dict[str, int], ComparisonGraph, ComparisonLog]:
    id_map: dict[str, int] = {}
    log = decompose_rankings(path, id_map)
    return id_map, log.to_graph(len(id_map)), log


def load_input(path, fmt: str | None = None):
    """Dispatch on ``fmt`` (``comparisons`` or ``rankings``), guessing from the first line if unset."""
    if fmt is None:
        fmt = "comparisons"
        for _, line in _lines(path):
            if line.strip():
                fmt = "comparisons" if "," in line else "rankings"
                break
    if fmt == "comparisons":
        return load_comparisons(path)
    if fmt == "rankings":
        return load_rankings(path)
    raise ValueError(f"unknown input format {fmt!r}")


def write_comparisons(path, log: ComparisonLog, names: list[str] | None = None) -> None:
    loser = log.loser
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("winner,loser\n")
        for w, l in zip(log.winner.tolist(), loser.tolist()):
            f.write(f"{names[w] if names else w},{names[l] if names else l}\n")


def write_rankings(path, rankings, names: list[str] | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for row in rankings:
            f.write(" ".join(names[x] if names else str(x) for x in row) + "\n")


@contextmanager
def _text_out(target):
    if hasattr(target, "write"):
        yield target
    else:
        with open(target, "w", encoding="utf-8", newline="") as f:
            yield f


def write_scores(path, names: list[str], pi, extra: dict[str, list] | None = None) -> None:
    """Delimited per-item table ``id,rank,pi,theta`` with 1-based ranks, best first."""
    pi = np.asarray(pi, dtype=np.float64)
    order = np.lexsort((np.arange(pi.size), -pi))
    extra = extra or {}
    with _text_out(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["id", "rank", "pi", "theta", *extra])
        for rank, i in enumerate(order, start=1):
            writer.writerow(
                [names[i], rank, repr(float(pi[i])), repr(float(np.log(pi[i]))),
                 *(col[i] for col in extra.values())]
            )


def results_schema() -> dict:
    text = resources.files("activerank").joinpath("schemas/results.schema.json").read_text("utf-8")
    return json.loads(text)


def dumps_results(result: ExperimentResult) -> str:
    return json.dumps(result.to_dict(), indent=2, allow_nan=False) + "\n"


def write_results(result: ExperimentResult, path: str | PathLike) -> None:
    Path(path).write_text(dumps_results(result), encoding="utf-8")


def read_results(path: str | PathLike) -> ExperimentResult:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        jsonschema.validate(data, results_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ResultsSchemaError(f"{path}: {where}: {exc.message}") from None
    return ExperimentResult.from_dict(data)
