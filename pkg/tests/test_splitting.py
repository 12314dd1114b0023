import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazetime.errors import EmptyDatasetError, SingleClassError
from gazetime.splitting import split_analysis_test, stratified_indices


def test_balanced_ten_items_give_one_test_item_per_class():
    y = np.array([0] * 5 + [1] * 5)
    analysis, test = split_analysis_test(y, 0.2, seed=0)
    assert len(test) == 2
    assert sorted(y[test]) == [0, 1]
    assert len(analysis) == 8
    assert sorted(np.concatenate([analysis, test])) == list(range(10))


def test_same_seed_reproduces_the_split():
    y = np.array([0, 1] * 20)
    first = split_analysis_test(y, 0.25, seed=7)
    second = split_analysis_test(y, 0.25, seed=7)
    assert np.array_equal(first[0], second[0])
    assert np.array_equal(first[1], second[1])
    third = split_analysis_test(y, 0.25, seed=8)
    assert not np.array_equal(first[1], third[1])


@settings(max_examples=40, deadline=None)
@given(
    counts=st.lists(st.integers(2, 30), min_size=2, max_size=4),
    fraction=st.floats(0.1, 0.5),
    seed=st.integers(0, 10_000),
)
def test_per_class_proportions_within_one_item(counts, fraction, seed):
    y = np.concatenate([np.full(n, cls) for cls, n in enumerate(counts)])
    analysis, test = split_analysis_test(y, fraction, seed=seed)
    assert len(analysis) + len(test) == len(y)
    assert len(np.intersect1d(analysis, test)) == 0
    for cls, n in enumerate(counts):
        got = int(np.sum(y[test] == cls))
        assert abs(got - fraction * n) <= 1.0


def test_trial_granularity_keeps_trials_intact():
    y = np.array([0, 0, 0, 1, 1, 1, 0, 0, 0, 1, 1, 1])
    groups = np.array(["a"] * 3 + ["b"] * 3 + ["c"] * 3 + ["d"] * 3)
    analysis, test = split_analysis_test(y, 0.5, seed=3, granularity="trial",
                                         groups=groups)
    test_groups = set(groups[test])
    analysis_groups = set(groups[analysis])
    assert test_groups.isdisjoint(analysis_groups)
    # stratified over trials: one test trial per class
    assert len(test_groups) == 2
    assert sorted({int(y[i]) for i in test}) == [0, 1]


def test_trial_granularity_rejects_mixed_label_trials():
    y = np.array([0, 1, 0, 1])
    groups = np.array(["a", "a", "b", "b"])
    with pytest.raises(ValueError, match="mixed labels"):
        split_analysis_test(y, 0.5, seed=0, granularity="trial",
                            groups=groups)


def test_single_class_is_rejected():
    with pytest.raises(SingleClassError):
        split_analysis_test(np.zeros(10, dtype=int), 0.2, seed=0)


def test_empty_input_is_rejected():
    with pytest.raises(EmptyDatasetError):
        split_analysis_test(np.zeros(0, dtype=int), 0.2, seed=0)


def test_non_strict_mode_keeps_singleton_classes_in_analysis():
    y = np.array([0, 0, 0, 0, 1])
    rng = np.random.default_rng(0)
    rest, test = stratified_indices(y, 0.25, rng, strict=False)
    assert 4 in rest  # the lone class-1 item stays on the analysis side
    assert len(rest) + len(test) == 5
