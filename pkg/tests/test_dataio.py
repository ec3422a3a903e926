import io
import json

import numpy as np
import pytest

from activerank.dataio import (
    ParseError,
    ResultsSchemaError,
    decompose_rankings,
    dumps_results,
    load_comparisons,
    load_input,
    load_rankings,
    read_results,
    write_comparisons,
    write_rankings,
    write_results,
    write_scores,
)
from activerank.estimators import arc_fit
from activerank.experiments import run_displacement_sim, run_strategy_compare
from activerank.metrics import ranking_from_estimate
from activerank.records import ExperimentConfig


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def small_result():
    cfg = ExperimentConfig("strategy-compare", n=(30,), lambdas=(2.0,), budgets=(20, 200),
                           realizations=2, seed=3)
    return run_strategy_compare(cfg)


def test_load_two_lines(tmp_path):
    ids, g, log = load_comparisons(write(tmp_path, "c.csv", "a,b\nb,a\n"))
    assert ids == {"a": 0, "b": 1}
    assert g.n == 2 and g.k(0, 1) == 2 and g.A(0, 1) == 1 and g.A(1, 0) == 1
    assert log.triples() == [(0, 1, 0), (1, 0, 1)]


def test_load_header_and_blank_lines(tmp_path):
    ids, g, _ = load_comparisons(write(tmp_path, "c.csv", "winner,loser\n\nx,y\n\ny,z\n"))
    assert list(ids) == ["x", "y", "z"] and g.num_outcomes == 2


def test_load_empty_file(tmp_path):
    ids, g, log = load_comparisons(write(tmp_path, "c.csv", ""))
    assert ids == {} and g.n == 0 and len(log) == 0


@pytest.mark.parametrize(
    "text,lineno",
    [("a,a\n", 1), ("a,b\nc\n", 2), ("a,b\n\na,b,c\n", 3), ("a,\n", 1)],
)
def test_parse_errors_name_line(tmp_path, text, lineno):
    with pytest.raises(ParseError) as exc:
        load_comparisons(write(tmp_path, "c.csv", text))
    assert exc.value.lineno == lineno and f":{lineno}:" in str(exc.value)


def test_graph_order_insensitive_log_order_preserving(tmp_path, rng):
    lines = [f"i{rng.integers(6)},j{rng.integers(6)}" for _ in range(200)]
    shuffled = [lines[k] for k in rng.permutation(len(lines))]
    ids1, g1, log1 = load_comparisons(write(tmp_path, "a.csv", "\n".join(lines) + "\n"))
    ids2, g2, _ = load_comparisons(write(tmp_path, "b.csv", "\n".join(shuffled) + "\n"))
    names1, names2 = list(ids1), list(ids2)
    assert g2.relabel([ids1[name] for name in names2]) == g1
    assert [f"{names1[w]},{names1[l]}" for w, l in zip(log1.winner, log1.loser)] == lines


def test_comparison_write_read_round_trip(tmp_path):
    ids, g, log = load_comparisons(write(tmp_path, "c.csv", "p,q\nq,r\nr,p\n"))
    write_comparisons(tmp_path / "out.csv", log, list(ids))
    ids2, g2, log2 = load_comparisons(tmp_path / "out.csv")
    assert ids2 == ids and g2 == g and log2 == log


def test_decompose_single_pair(tmp_path):
    log = decompose_rankings(write(tmp_path, "r.txt", "x y\n"))
    assert log.triples() == [(0, 1, 0)]


def test_decompose_ten_items(tmp_path):
    log = decompose_rankings(write(tmp_path, "r.txt", " ".join(f"s{i}" for i in range(10)) + "\n"))
    assert len(log) == 45
    assert log.triples()[:3] == [(0, 1, 0), (0, 2, 0), (0, 3, 0)]


def test_decompose_sushi_shape(tmp_path, rng):
    rows = [rng.choice(100, size=10, replace=False) for _ in range(5000)]
    write_rankings(tmp_path / "r.txt", rows, [f"s{i}" for i in range(100)])
    ids, g, log = load_rankings(tmp_path / "r.txt")
    assert len(log) == 225000 and g.num_outcomes == 225000


@pytest.mark.parametrize("text", ["a b a\n", "solo\n"])
def test_decompose_errors(tmp_path, text):
    with pytest.raises(ParseError):
        decompose_rankings(write(tmp_path, "r.txt", text))


def test_full_ranking_ml_order(tmp_path):
    names = ["e", "b", "d", "a", "c"]
    ids, g, _ = load_rankings(write(tmp_path, "r.txt", " ".join(names) + "\n"))
    fit = arc_fit(g, pseudo_count=0.01)
    assert [list(ids)[i] for i in ranking_from_estimate(fit.pi).order] == names


def test_load_input_guesses_format(tmp_path):
    assert load_input(write(tmp_path, "c.txt", "a,b\n"))[1].num_outcomes == 1
    assert load_input(write(tmp_path, "r.txt", "a b c\n"))[1].num_outcomes == 3
    with pytest.raises(ValueError):
        load_input(write(tmp_path, "x.txt", "a,b\n"), "xml")


def test_write_scores_to_stream():
    buf = io.StringIO()
    write_scores(buf, ["a", "b", "c"], [0.2, 0.5, 0.3])
    rows = buf.getvalue().splitlines()
    assert rows[0] == "id,rank,pi,theta"
    assert [r.split(",")[:2] for r in rows[1:]] == [["b", "1"], ["c", "2"], ["a", "3"]]


def test_results_round_trip(tmp_path, small_result):
    write_results(small_result, tmp_path / "r.json")
    assert read_results(tmp_path / "r.json") == small_result


def test_results_byte_identical(tmp_path, small_result):
    rerun = run_strategy_compare(small_result.config)
    assert dumps_results(rerun) == dumps_results(small_result)


def test_results_missing_seed_named(tmp_path, small_result):
    data = small_result.to_dict()
    del data["seed"]
    (tmp_path / "r.json").write_text(json.dumps(data))
    with pytest.raises(ResultsSchemaError, match="seed"):
        read_results(tmp_path / "r.json")


def test_results_json_is_strict(small_result):
    text = dumps_results(small_result)
    assert "NaN" not in text and "Infinity" not in text
    data = json.loads(text)
    assert data["budgets"] == [20, 200]
    assert len(data["metrics"]["avg_displacement.sorting"]["mean"]) == 2


def test_displacement_result_round_trip(tmp_path):
    cfg = ExperimentConfig("displacement-sim", n=(50,), lambdas=(1.0, 4.0), realizations=3, seed=1)
    result = run_displacement_sim(cfg)
    write_results(result, tmp_path / "d.json")
    loaded = read_results(tmp_path / "d.json")
    assert loaded == result and loaded.axis["name"] == "lambda"
    assert np.all(np.array(result.metrics["avg_displacement"]["std"]) >= 0)
