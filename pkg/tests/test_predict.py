import math

import pytest
from hypothesis import given, settings, strategies as st

from lexkit.errors import EmptyInputError, ValidationError
from lexkit.predict import (
    SelectionRule,
    load_predictions,
    load_rule,
    rank_scores,
    save_predictions,
    save_rule,
    search_k_m,
    select_threshold,
    select_topk_margin,
)
from oracles import oracle_search_k_m, oracle_threshold, oracle_topk_margin

ranked_lists = st.lists(
    st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=8
).map(lambda xs: [(f"d{i}", s) for i, s in enumerate(sorted(xs, reverse=True))])


def test_margin_example():
    ranked = [("a", 0.9), ("b", 0.88), ("c", 0.5)]
    assert select_topk_margin(ranked, k=3, m=0.05) == ["a", "b"]


def test_margin_zero_selects_top1_only():
    ranked = [("a", 0.9), ("b", 0.9), ("c", 0.9)]
    assert select_topk_margin(ranked, k=3, m=0.0) == ["a"]


def test_k1_selects_top1_regardless_of_margin():
    ranked = [("a", 0.9), ("b", 0.89)]
    assert select_topk_margin(ranked, k=1, m=10.0) == ["a"]


def test_margin_empty_is_error():
    with pytest.raises(EmptyInputError):
        select_topk_margin([], 3, 0.1)


def test_margin_requires_sorted():
    with pytest.raises(ValidationError):
        select_topk_margin([("a", 0.1), ("b", 0.9)], 2, 0.1)


def test_threshold_examples():
    ranked = [("a", 0.8), ("b", 0.3)]
    assert select_threshold(ranked, 0.5) == ["a"]
    assert select_threshold(ranked, 0.9) == []
    assert select_threshold(ranked, -math.inf) == ["a", "b"]


@settings(max_examples=300, deadline=None)
@given(ranked_lists, st.integers(min_value=1, max_value=8),
       st.floats(min_value=0.0, max_value=1.0))
def test_topk_margin_matches_bruteforce(ranked, k, m):
    assert select_topk_margin(ranked, k, m) == oracle_topk_margin(ranked, k, m)


@settings(max_examples=300, deadline=None)
@given(ranked_lists, st.floats(min_value=-0.5, max_value=1.5))
def test_threshold_matches_bruteforce(ranked, t):
    assert select_threshold(ranked, t) == oracle_threshold(ranked, t)


@settings(max_examples=150, deadline=None)
@given(ranked_lists, st.integers(min_value=1, max_value=8),
       st.floats(min_value=0.0, max_value=0.5), st.floats(min_value=0.0, max_value=0.5))
def test_margin_monotone_in_m(ranked, k, m1, dm):
    small = set(select_topk_margin(ranked, k, m1))
    large = set(select_topk_margin(ranked, k, m1 + dm))
    assert small <= large


@settings(max_examples=150, deadline=None)
@given(ranked_lists, st.integers(min_value=1, max_value=7),
       st.floats(min_value=0.0, max_value=1.0))
def test_margin_monotone_in_k(ranked, k, m):
    small = set(select_topk_margin(ranked, k, m))
    large = set(select_topk_margin(ranked, k + 1, m))
    assert small <= large


@settings(max_examples=150, deadline=None)
@given(ranked_lists, st.floats(min_value=0.0, max_value=1.0),
       st.floats(min_value=0.0, max_value=1.0))
def test_threshold_antitone_in_t(ranked, t1, dt):
    high = set(select_threshold(ranked, t1 + dt))
    low = set(select_threshold(ranked, t1))
    assert high <= low


def test_rule_wrapping_and_validation():
    rule = SelectionRule(kind="topk-margin", k=2, m=0.1)
    assert rule.apply([("a", 0.9), ("b", 0.85), ("c", 0.1)]) == ["a", "b"]
    with pytest.raises(ValidationError):
        SelectionRule(kind="topk-margin", k=2)
    with pytest.raises(ValidationError):
        SelectionRule(kind="threshold", t=0.5, k=1)
    with pytest.raises(ValidationError):
        SelectionRule(kind="nope")


# ---------------------------------------------------------------------------
# k/m search
# ---------------------------------------------------------------------------


def _micro_f1(preds, gold):
    tp = sum(len(set(preds[q]) & gold[q]) for q in gold)
    retrieved = sum(len(preds[q]) for q in gold)
    relevant = sum(len(gold[q]) for q in gold)
    p = tp / retrieved if retrieved else 0.0
    r = tp / relevant if relevant else 0.0
    return 2 * p * r / (p + r) if p + r else 0.0


def test_search_single_grid_point():
    # Gap 0.7 >= m, so only the top doc is kept: perfect F1 here.
    ranked = {"q": [("a", 0.9), ("b", 0.2)]}
    gold = {"q": {"a"}}
    assert search_k_m(ranked, gold, [2], [0.3], _micro_f1) == (2, 0.3, pytest.approx(1.0))


def test_search_2x2_matches_oracle():
    ranked = {
        "q1": [("a", 0.9), ("b", 0.85), ("c", 0.2)],
        "q2": [("d", 0.7), ("e", 0.1)],
    }
    gold = {"q1": {"a", "b"}, "q2": {"d"}}
    got = search_k_m(ranked, gold, [1, 2], [0.0, 0.1], _micro_f1)
    want = oracle_search_k_m(ranked, gold, [1, 2], [0.0, 0.1])
    assert got == want


def test_search_tie_prefers_smallest_k_then_m():
    ranked = {"q": [("a", 0.9)]}
    gold = {"q": {"a"}}
    k, m, value = search_k_m(ranked, gold, [3, 1, 2], [0.2, 0.0, 0.1], _micro_f1)
    assert (k, m, value) == (1, 0.0, 1.0)


def test_search_empty_inputs():
    with pytest.raises(EmptyInputError):
        search_k_m({}, {}, [1], [0.0], _micro_f1)
    with pytest.raises(EmptyInputError):
        search_k_m({"q": [("a", 1.0)]}, {"q": {"a"}}, [], [0.0], _micro_f1)


def test_search_uncovered_gold_query_is_error():
    with pytest.raises(ValidationError, match="q2"):
        search_k_m({"q1": [("a", 1.0)]}, {"q1": {"a"}, "q2": {"b"}}, [1], [0.0], _micro_f1)


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------


def test_rank_scores_groups_and_sorts():
    combined = {("q", "b"): 0.5, ("q", "a"): 0.5, ("q", "c"): 0.9}
    assert rank_scores(combined) == {"q": [("c", 0.9), ("a", 0.5), ("b", 0.5)]}


def test_predictions_round_trip(tmp_path):
    preds = {"q2": ["b", "a"], "q1": []}
    path = tmp_path / "preds.jsonl"
    save_predictions(preds, path)
    assert load_predictions(path) == preds


def test_rule_round_trip(tmp_path):
    for rule in (SelectionRule(kind="topk-margin", k=4, m=0.02),
                 SelectionRule(kind="threshold", t=0.7)):
        path = tmp_path / "rule.json"
        save_rule(rule, path)
        assert load_rule(path) == rule
