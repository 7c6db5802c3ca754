from __future__ import annotations

import itertools
import random
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planact.metrics import (
    GEN_BEFORE_EDIT,
    UNDERSTAND_BEFORE_EDIT,
    DependencyRule,
    JudgeVote,
    MetricReport,
    aggregate_judgments,
    default_rules,
    depcov,
    induced_pairs,
    levenshtein,
    qa_accuracy,
    replanq,
    success_rate,
    weighted_levenshtein,
    wped,
)


@lru_cache(maxsize=None)
def oracle(a: tuple, b: tuple) -> int:
    """Textbook recursive edit distance, independent of the DP implementation."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    cost = 0 if a[0] == b[0] else 1
    return min(
        oracle(a[1:], b) + 1,
        oracle(a, b[1:]) + 1,
        oracle(a[1:], b[1:]) + cost,
    )


tokens = st.lists(st.sampled_from(["a", "b", "c", "d"]), max_size=8).map(tuple)


# ---------------------------------------------------------------------------
# levenshtein

def test_levenshtein_all_insertions():
    assert levenshtein([], ["a", "b", "c"]) == 3


def test_levenshtein_identity():
    seq = ["merge_video", "text2video_gen"]
    assert levenshtein(seq, seq) == 0


def test_levenshtein_kitten_sitting():
    # oracle(kitten, sitting) = 3: two substitutions and one insertion
    a = tuple("kitten")
    b = tuple("sitting")
    assert oracle(a, b) == 3
    assert levenshtein(a, b) == 3


@settings(max_examples=300, deadline=None)
@given(a=tokens, b=tokens)
def test_levenshtein_matches_oracle(a, b):
    assert levenshtein(a, b) == oracle(a, b)


@settings(max_examples=150, deadline=None)
@given(a=tokens, b=tokens, c=tokens)
def test_levenshtein_metric_properties(a, b, c):
    assert levenshtein(a, b) == levenshtein(b, a)
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)
    assert levenshtein(a, b) <= max(len(a), len(b))


def test_exhaustive_small_alphabet():
    sequences = [
        seq
        for length in range(0, 4)
        for seq in itertools.product("ab", repeat=length)
    ]
    for a in sequences:
        for b in sequences:
            assert levenshtein(a, b) == oracle(a, b)


# ---------------------------------------------------------------------------
# wped

def test_wped_identical():
    seq = ["a", "b", "c"]
    assert wped(seq, seq) == 1.0


def test_wped_single_substitution_over_three():
    pred = ["text2video_gen", "repainting", "merge_video"]
    ref = ["text2video_gen", "recolor", "merge_video"]
    assert wped(pred, ref) == pytest.approx(1 - 1 / 3, abs=1e-9)


def test_wped_empty_vs_nonempty():
    assert wped([], ["a", "b", "c", "d"]) == 0.0


def test_wped_both_empty():
    assert wped([], []) == 1.0


@settings(max_examples=200, deadline=None)
@given(a=tokens, b=tokens)
def test_wped_symmetric_and_bounded(a, b):
    assert wped(a, b) == pytest.approx(wped(b, a))
    assert 0.0 <= wped(a, b) <= 1.0
    assert wped(a, a) == 1.0


def test_unit_weights_reduce_to_plain_wped():
    pred = ["text2video_gen", "repainting", "merge_video"]
    ref = ["text2video_gen", "recolor", "merge_video"]
    weights = {name: 1.0 for name in pred + ref}
    assert wped(pred, ref, weights) == pytest.approx(wped(pred, ref))
    assert weighted_levenshtein(pred, ref, weights) == levenshtein(pred, ref)


# ---------------------------------------------------------------------------
# depcov

def test_depcov_generation_before_edit():
    assert depcov(["text2video_gen", "repainting"], [GEN_BEFORE_EDIT]) == 1.0


def test_depcov_orphan_edit():
    assert depcov(["repainting"], [GEN_BEFORE_EDIT]) == 0.0


def test_depcov_vacuous():
    assert depcov(["text2video_gen", "video_extension"], [GEN_BEFORE_EDIT]) == 1.0


def test_depcov_mixed():
    tools = ["repainting", "text2video_gen", "recolor"]
    satisfied, total = induced_pairs(tools, GEN_BEFORE_EDIT)
    assert (satisfied, total) == (1, 2)
    assert depcov(tools, [GEN_BEFORE_EDIT]) == 0.5


def test_depcov_ingestion_counts_as_generation():
    assert depcov(["materials_search", "recolor"], [GEN_BEFORE_EDIT]) == 1.0


NEUTRAL = ["vision2text_gen", "speech_gen", "add_subtitle", "music_gen"]


@settings(max_examples=100, deadline=None)
@given(data=st.data())
def test_depcov_invariant_under_neutral_steps(data):
    base = data.draw(
        st.lists(
            st.sampled_from(["text2video_gen", "repainting", "recolor", "merge_video"]),
            max_size=6,
        )
    )
    value = depcov(base, [GEN_BEFORE_EDIT])
    padding = data.draw(st.lists(st.sampled_from(NEUTRAL), min_size=1, max_size=4))
    position = data.draw(st.integers(0, len(base)))
    augmented = base[:position] + padding + base[position:]
    assert depcov(augmented, [GEN_BEFORE_EDIT]) == value


def test_rule_sets_must_be_disjoint():
    with pytest.raises(ValueError):
        DependencyRule("bad", "overlap", frozenset({"x"}), frozenset({"x"}))


def test_default_rules_is_gen_before_edit_only():
    assert default_rules() == [GEN_BEFORE_EDIT]
    assert UNDERSTAND_BEFORE_EDIT not in default_rules()


# ---------------------------------------------------------------------------
# replanq

def test_replanq_identity():
    seq = ["a", "b", "c"]
    for i in range(len(seq) + 1):
        assert replanq(seq, seq, i) == 1.0


def test_replanq_single_substitution_suffix():
    assert replanq(["a", "b", "c"], ["a", "x", "c"], 1) == pytest.approx(0.5)


def test_replanq_empty_replacement_suffix():
    assert replanq(["a", "b", "c"], ["a"], 1) == 0.0


def test_replanq_disjoint_suffixes():
    assert replanq(["a", "x", "y"], ["a", "p", "q"], 1) == 0.0


def test_replanq_index_bounds():
    with pytest.raises(IndexError):
        replanq(["a"], ["a"], 2)
    with pytest.raises(IndexError):
        replanq(["a"], ["a"], -1)


@settings(max_examples=150, deadline=None)
@given(seq=tokens, i=st.integers(0, 8))
def test_replanq_self_is_one(seq, i):
    if i <= len(seq):
        assert replanq(seq, seq, i) == 1.0


# ---------------------------------------------------------------------------
# success rate / qa accuracy / judge votes

def _report(w):
    return MetricReport(wped=w, success=w is not None and w > 0)


def test_success_rate_counts_positive_wped():
    reports = [_report(0.5), _report(0.0), _report(0.2), _report(0.0)]
    assert success_rate(reports) == 0.5


def test_success_rate_all_zero():
    assert success_rate([_report(0.0)] * 3) == 0.0


def test_success_rate_rejects_empty():
    with pytest.raises(ValueError):
        success_rate([])


def test_qa_accuracy_exact():
    assert qa_accuracy(["x", "y"], ["x", "y"]) == 1.0
    assert qa_accuracy(["x", "y"], ["p", "q"]) == 0.0
    assert qa_accuracy(["x", "y", "z", "w"], ["x", "q", "z", "v"]) == 0.5


def test_qa_accuracy_length_mismatch():
    with pytest.raises(ValueError):
        qa_accuracy(["a"], ["a", "b"])


def votes(*prefs):
    return [JudgeVote(f"j{i}", p) for i, p in enumerate(prefs)]


def test_majority_wins():
    assert aggregate_judgments(votes("A", "A", "B")) == "A"


def test_split_vote_discarded():
    assert aggregate_judgments(votes("A", "B")) is None


def test_ties_removed_before_counting():
    assert aggregate_judgments(votes("tie", "tie", "A")) == "A"


def test_all_ties_discarded():
    assert aggregate_judgments(votes("tie", "tie")) is None


def test_winner_needs_strict_majority():
    rng = random.Random(11)
    for _ in range(500):
        prefs = [rng.choice(["A", "B", "tie"]) for _ in range(rng.randint(1, 9))]
        winner = aggregate_judgments(votes(*prefs))
        a, b = prefs.count("A"), prefs.count("B")
        if winner == "A":
            assert a > b
        elif winner == "B":
            assert b > a
        else:
            assert a == b
