"""Stratified analysis/test splitting at slice or trial granularity."""

from __future__ import annotations

import numpy as np

from .errors import (
    EmptyDatasetError,
    SingleClassError,
    StratificationImpossibleError,
)


def _test_count(n_class: int, fraction: float) -> int:
    # round half up, so 5 items at 0.2 give exactly 1
    return int(np.floor(n_class * fraction + 0.5))


def stratified_indices(y, test_fraction: float, rng: np.random.Generator,
                       strict: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Split item indices into (rest, test), stratified by label.

    Each class contributes round(fraction * count) items to the test side,
    so per-class proportions hold to within one item.  With ``strict`` the
    split fails (StratificationImpossibleError) unless every class can
    appear on both sides; otherwise single-member classes stay on the rest
    side and the caller is expected to flag the degeneracy.
    """
    y = np.asarray(y)
    if len(y) == 0:
        raise EmptyDatasetError("cannot split zero samples")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie strictly between 0 and 1")
    rest, test = [], []
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        n_test = _test_count(len(idx), test_fraction)
        if strict:
            if len(idx) < 2:
                raise StratificationImpossibleError(
                    f"class {cls} has {len(idx)} member(s); need >= 2")
            n_test = min(max(n_test, 1), len(idx) - 1)
        else:
            n_test = min(max(n_test, 1 if len(idx) > 1 else 0), max(len(idx) - 1, 0))
        perm = rng.permutation(idx)
        test.append(perm[:n_test])
        rest.append(perm[n_test:])
    rest = np.sort(np.concatenate(rest))
    test = np.sort(np.concatenate(test)) if test else np.zeros(0, dtype=np.int64)
    return rest, test


def split_analysis_test(y, test_fraction: float, seed: int,
                        granularity: str = "slice",
                        groups=None) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic stratified split of labeled slices.

    ``granularity`` is "slice" (each window is split independently) or
    "trial" (all slices of one trial move together; trials are stratified
    by their shared label, which requires ``groups`` of trial identifiers).
    Returns (analysis_indices, test_indices), disjoint and exhaustive.
    """
    y = np.asarray(y)
    if len(y) == 0:
        raise EmptyDatasetError("cannot split an empty sample set")
    if len(np.unique(y)) < 2:
        raise SingleClassError("stratified split needs at least two classes")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if granularity == "slice":
        return stratified_indices(y, test_fraction, rng)
    if granularity != "trial":
        raise ValueError(f"unknown granularity {granularity!r}")
    if groups is None:
        raise ValueError("trial granularity requires group identifiers")
    groups = np.asarray(groups)
    uniq, first = np.unique(groups, return_index=True)
    group_labels = []
    for g, i in zip(uniq, first):
        members = y[groups == g]
        if np.any(members != members[0]):
            raise ValueError(f"trial {g!r} carries mixed labels")
        group_labels.append(y[i])
    rest_g, test_g = stratified_indices(np.asarray(group_labels),
                                        test_fraction, rng)
    test_set = set(uniq[test_g].tolist())
    mask = np.fromiter((g in test_set for g in groups), dtype=bool,
                       count=len(groups))
    return np.flatnonzero(~mask), np.flatnonzero(mask)
