import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nested_enet.analysis import (
    nesting_overlap,
    rejection_region,
    selection_frequency,
    support_recovery_score,
)
from oracles import brute_force_rejection

G = [set(range(1, 6)), set(range(6, 11)), set(range(11, 16))]


def test_nesting_examples():
    assert nesting_overlap([{1, 2}, {1, 2, 3}]).overlap_percent == (100.0,)
    assert nesting_overlap([{1, 2}, {3, 4}]).overlap_percent == (0.0,)
    r = nesting_overlap([{1, 2, 3, 4, 5, 6}, {1, 2, 3, 4, 5, 7, 8}])
    assert r.cardinalities == (6, 7)
    assert r.overlap_percent[0] == pytest.approx(100 * 5 / 6)


def test_nesting_table_row():
    # 36 features, 30 of which survive: 83%
    first = set(range(36))
    second = set(range(30)) | set(range(100, 120))
    assert round(nesting_overlap([first, second]).overlap_percent[0]) == 83


def test_nesting_empty_support_is_vacuous():
    r = nesting_overlap([set(), {1}, {1, 2}])
    assert r.overlap_percent == (100.0, 100.0) and r.perfectly_nested


def test_nesting_needs_two():
    with pytest.raises(ValueError):
        nesting_overlap([{1}])


sets = st.lists(st.frozensets(st.integers(0, 30), max_size=12), min_size=2, max_size=6)


@given(sets, st.permutations(range(31)))
def test_nesting_permutation_invariant(supports, perm):
    relabeled = [{perm[j] for j in s} for s in supports]
    assert nesting_overlap(supports) == nesting_overlap(relabeled)


@given(sets)
def test_nesting_bounds(supports):
    r = nesting_overlap(supports)
    for (a, b), v in zip(zip(supports, supports[1:]), r.overlap_percent):
        assert 0 <= v <= 100
        if a <= b:
            assert v == 100


def test_rejection_degenerate():
    r = rejection_region([-2, -1, 0.5, 3], [-1, -1, 1, 1])
    assert r.degenerate and r.sides == 0
    assert (r.lower, r.upper) == (0.0, 0.0)
    assert r.rejected_fraction == {-1: 0.0, 1: 0.0}


def test_rejection_one_sided():
    r = rejection_region([-3, -1, -0.2, 1, 2], [-1, -1, 1, 1, 1])
    assert (r.lower, r.upper) == (-0.2, 0.0)
    assert r.sides == 1
    assert r.rejected.tolist() == [False, False, True, False, False]
    assert r.rejected_fraction[1] == 0.0 and r.rejected_fraction[-1] == pytest.approx(1 / 3)


def test_rejection_two_sided():
    scores = [-3, -1, 0.5, -0.4, 2, 3]
    labels = [-1, -1, -1, 1, 1, 1]
    r = rejection_region(scores, labels)
    assert (r.lower, r.upper) == (-0.4, 0.5)
    assert r.sides == 2
    assert r.rejected.tolist() == [False, False, True, True, False, False]
    assert r.rejected_fraction == {-1: pytest.approx(1 / 3), 1: pytest.approx(1 / 3)}


def test_rejection_zero_score_negative_is_an_error():
    r = rejection_region([0.0, 1.0, -1.0], [-1, 1, -1])
    assert not r.degenerate and (r.lower, r.upper) == (0.0, 0.0)
    assert r.rejected.tolist() == [True, False, False]


def test_rejection_length_mismatch():
    with pytest.raises(ValueError):
        rejection_region([1, 2], [1])


scores_labels = st.integers(1, 14).flatmap(
    lambda n: st.tuples(
        st.lists(st.sampled_from([-2.0, -1.5, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 2.0]), min_size=n, max_size=n),
        st.lists(st.sampled_from([-1.0, 1.0]), min_size=n, max_size=n),
    )
)


@given(scores_labels)
def test_rejection_minimal_and_clean(data):
    scores, labels = map(np.array, data)
    r = rejection_region(scores, labels)
    keep = ~r.rejected
    assert np.all(np.where(scores[keep] >= 0, 1, -1) == labels[keep])
    if r.degenerate:
        assert np.all(np.where(scores >= 0, 1, -1) == labels)
    else:
        a, b = brute_force_rejection(scores, labels)
        assert (r.lower, r.upper) == (a, b)


def test_selection_frequency_identical_supports():
    r = selection_frequency([{1, 4, 5}] * 4, 8)
    assert r.cumulative == (3,) * 10
    assert r.always_selected == 3 and r.mean_support_size == 3


def test_selection_frequency_disjoint():
    r = selection_frequency([{1}, {2}, {3}], 5)
    assert r.n_selected_at_least(1 / 3) == 3
    assert r.n_selected_at_least(0.5) == 0
    assert r.cumulative[0] == 3 and r.cumulative[4] == 0


def test_selection_frequency_needs_input():
    with pytest.raises(ValueError):
        selection_frequency([], 3)


@given(st.lists(st.frozensets(st.integers(0, 19), max_size=10), min_size=1, max_size=12))
def test_cumulative_curve_monotone(supports):
    r = selection_frequency(supports, 20)
    assert all(a >= b for a, b in zip(r.cumulative, r.cumulative[1:]))
    assert r.always_selected == r.cumulative[-1]
    assert r.mean_support_size == pytest.approx(np.mean([len(s) for s in supports]))


def test_stability_to_dict_uses_ids():
    r = selection_frequency([{0, 2}, {2}], 3)
    assert r.to_dict(["a", "b", "c"])["selection_counts"] == {"a": 1, "c": 2}


def test_recovery_correct():
    s = support_recovery_score({1, 7, 12}, G)
    assert s.correct and not s.slightly_redundant and s.ratio == 1


def test_recovery_slightly_redundant():
    s = support_recovery_score({1, 2, 7, 12}, G)
    assert not s.correct and s.slightly_redundant and s.ratio == 1


def test_recovery_noise_feature():
    s = support_recovery_score({1, 7, 12, 20}, G)
    assert not s.correct and not s.slightly_redundant
    assert s.ratio == pytest.approx(3 / 4) and s.outside == 1


def test_recovery_missing_group_and_empty():
    s = support_recovery_score({1, 2}, G)
    assert not s.correct and s.per_group == (2, 0, 0)
    assert support_recovery_score(set(), G).ratio == 0
