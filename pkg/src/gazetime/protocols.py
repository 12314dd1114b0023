"""Evaluation regimes: holdout, per-condition splits and user fine-tuning.

All protocols repeat training over seeded stratified splits and report
mean and population standard deviation of accuracy next to the evaluated
subset's majority-class share (the chance-level baseline).  Repetition i
derives its randomness from (seed, i), so aggregates are independent of
execution order and thread count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._parallel import thread_map
from .errors import NoEvalSlicesError, StratificationImpossibleError
from .labels import SampleSet
from .estimators.pipeline import Pipeline, PipelineSpec, fit_seed
from .splitting import stratified_indices

FLAG_SINGLE_REPETITION = "single_repetition"
FLAG_SUBSET_TOO_SMALL = "subset_too_small"
FLAG_STRATIFICATION_FAILED = "stratification_failed"
FLAG_DEGENERATE_FIT = "degenerate_fit"


@dataclass
class EvaluationReport:
    protocol: str
    label_family: str
    n_classes: int
    t_w: float
    subset_key: str
    subset_value: object
    repetitions: int
    accuracies: list[float]
    majority_class_share: float
    flags: list[str] = field(default_factory=list)

    @property
    def accuracy_mean(self) -> float:
        return float(np.mean(self.accuracies)) if self.accuracies else float("nan")

    @property
    def accuracy_std(self) -> float:
        # population convention; a single repetition reports 0 and is flagged
        return float(np.std(self.accuracies)) if self.accuracies else float("nan")

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "label_family": self.label_family,
            "n_classes": self.n_classes,
            "t_w": self.t_w,
            "subset_key": self.subset_key,
            "subset_value": self.subset_value,
            "repetitions": self.repetitions,
            "accuracy_mean": self.accuracy_mean,
            "accuracy_std": self.accuracy_std,
            "majority_class_share": self.majority_class_share,
            "flags": list(self.flags),
            "accuracies": [float(a) for a in self.accuracies],
        }


@dataclass
class FinetuneReport:
    participant_id: str
    t_w: float
    label_family: str
    n_classes: int
    repetitions: int
    accuracies_with_setup: list[float]
    accuracies_without_setup: list[float]
    n_setup: int
    n_eval: int

    @property
    def accuracy_with_setup(self) -> float:
        return float(np.mean(self.accuracies_with_setup))

    @property
    def accuracy_without_setup(self) -> float:
        return float(np.mean(self.accuracies_without_setup))

    @property
    def delta_pp(self) -> float:
        """Fine-tuning gain in percentage points (rounded only at display)."""
        return 100.0 * (self.accuracy_with_setup - self.accuracy_without_setup)

    def to_dict(self) -> dict:
        return {
            "participant_id": self.participant_id,
            "t_w": self.t_w,
            "label_family": self.label_family,
            "n_classes": self.n_classes,
            "repetitions": self.repetitions,
            "accuracy_with_setup": self.accuracy_with_setup,
            "accuracy_without_setup": self.accuracy_without_setup,
            "delta_pp": self.delta_pp,
            "n_setup": self.n_setup,
            "n_eval": self.n_eval,
        }


def _sample_t_w(samples: SampleSet) -> float:
    values = np.unique(samples.column("t_w_s").astype(float))
    return float(values[0]) if len(values) == 1 else float("nan")


def check_no_leakage(analysis: SampleSet, test: SampleSet) -> None:
    """Provenance keys must not appear on both sides of the holdout."""
    key_cols = ["participant_id", "trial_id", "t_start_s"]
    a = set(map(tuple, analysis.frame[key_cols].itertuples(index=False)))
    b = set(map(tuple, test.frame[key_cols].itertuples(index=False)))
    common = a & b
    if common:
        raise ValueError(f"analysis/test overlap on {len(common)} window(s)")


def holdout_eval(spec: PipelineSpec, analysis: SampleSet, test: SampleSet,
                 repetitions: int = 100, seed: int = 0,
                 train_fraction: float = 0.8,
                 threads: int = 1) -> EvaluationReport:
    """Refit on fresh stratified train fractions; score all test windows."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    check_no_leakage(analysis, test)
    X, y = analysis.X, analysis.y
    X_test, y_test = test.X, test.y
    flags = []

    def one_rep(i: int) -> tuple[float, bool]:
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(i,)))
        train_idx, _ = stratified_indices(y, 1.0 - train_fraction, rng)
        pipe = Pipeline(spec, random_state=fit_seed(seed, i, 1))
        pipe.fit(X[train_idx], y[train_idx])
        return float(np.mean(pipe.predict(X_test) == y_test)), pipe.degenerate

    results = thread_map(one_rep, range(repetitions), threads)
    accuracies = [acc for acc, _ in results]
    if any(degenerate for _, degenerate in results):
        flags.append(FLAG_DEGENERATE_FIT)
    if repetitions == 1:
        flags.append(FLAG_SINGLE_REPETITION)
    return EvaluationReport(
        protocol="holdout", label_family=analysis.spec.family,
        n_classes=analysis.spec.n_classes, t_w=_sample_t_w(analysis),
        subset_key="all", subset_value="all", repetitions=repetitions,
        accuracies=accuracies, majority_class_share=test.majority_share,
        flags=flags)


def _shuffle_split_eval(spec, samples: SampleSet, protocol: str,
                        subset_key: str, subset_value, repetitions: int,
                        seed: int, test_fraction: float,
                        min_per_class: int, threads: int) -> EvaluationReport:
    X, y = samples.X, samples.y
    flags = []
    counts = np.unique(y, return_counts=True)[1]
    if len(samples) < min_per_class * len(counts) or counts.min() < 2:
        flags.append(FLAG_SUBSET_TOO_SMALL)

    def one_rep(i: int):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(i,)))
        train_idx, eval_idx = stratified_indices(y, test_fraction, rng)
        pipe = Pipeline(spec, random_state=fit_seed(seed, i, 1))
        pipe.fit(X[train_idx], y[train_idx])
        return (float(np.mean(pipe.predict(X[eval_idx]) == y[eval_idx])),
                pipe.degenerate)

    try:
        results = thread_map(one_rep, range(repetitions), threads)
        accuracies = [acc for acc, _ in results]
        if any(d for _, d in results):
            flags.append(FLAG_DEGENERATE_FIT)
    except StratificationImpossibleError:
        accuracies = []
        flags.append(FLAG_STRATIFICATION_FAILED)
    if repetitions == 1:
        flags.append(FLAG_SINGLE_REPETITION)
    return EvaluationReport(
        protocol=protocol, label_family=samples.spec.family,
        n_classes=samples.spec.n_classes, t_w=_sample_t_w(samples),
        subset_key=subset_key, subset_value=subset_value,
        repetitions=repetitions, accuracies=accuracies,
        majority_class_share=samples.majority_share, flags=flags)


def condition_split_eval(spec: PipelineSpec, samples: SampleSet, key: str,
                         repetitions: int = 100, seed: int = 0,
                         test_fraction: float = 0.2, min_per_class: int = 10,
                         threads: int = 1) -> dict[object, EvaluationReport]:
    """Stratified shuffle-split evaluation within each condition subset.

    ``key`` is "n_active" or "planned_duration_s".  Degenerate subsets are
    reported with flags instead of aborting, so sweep outputs stay
    rectangular.
    """
    if key not in ("n_active", "planned_duration_s"):
        raise ValueError(f"unsupported condition key {key!r}")
    values = samples.column(key)
    out = {}
    for value in sorted(np.unique(values).tolist()):
        subset = samples.subset(np.flatnonzero(values == value))
        out[value] = _shuffle_split_eval(
            spec, subset, protocol=f"condition:{key}", subset_key=key,
            subset_value=value, repetitions=repetitions,
            seed=fit_seed(seed, int(value)), test_fraction=test_fraction,
            min_per_class=min_per_class, threads=threads)
    return out


def setup_eval_partition(samples: SampleSet, participant_id: str,
                         setup_window: float = 30.0
                         ) -> tuple[np.ndarray, np.ndarray]:
    """Split one participant's windows into setup and evaluation sets.

    Windows ending within the setup period are setup data; when windows
    are longer than the setup period the first window of each trial plays
    that role.  The two sets are disjoint and jointly cover all of the
    participant's windows.
    """
    mine = samples.column("participant_id") == participant_id
    t_start = samples.column("t_start_s").astype(float)
    t_w = samples.column("t_w_s").astype(float)
    if np.any(mine) and float(t_w[mine][0]) > setup_window:
        setup = mine & (t_start == 0.0)
    else:
        setup = mine & (t_start + t_w <= setup_window + 1e-9)
    eval_mask = mine & ~setup
    return np.flatnonzero(setup), np.flatnonzero(eval_mask)


def finetune_eval(spec: PipelineSpec, samples: SampleSet, participant_id: str,
                  setup_window: float = 30.0, repetitions: int = 100,
                  seed: int = 0, threads: int = 1) -> FinetuneReport:
    """Compare training with vs without the participant's setup windows.

    Both conditions are scored on the participant's post-setup windows:
    condition A trains on all other participants' data plus the setup
    windows, condition B on the other participants' data only.
    """
    participants = samples.column("participant_id")
    if participant_id not in participants:
        raise KeyError(f"unknown participant {participant_id!r}")
    others = np.flatnonzero(participants != participant_id)
    if len(others) == 0:
        raise ValueError("fine-tuning needs at least one other participant")
    setup_idx, eval_idx = setup_eval_partition(samples, participant_id,
                                               setup_window)
    if len(eval_idx) == 0:
        raise NoEvalSlicesError(
            f"participant {participant_id!r} has no post-setup windows")
    X, y = samples.X, samples.y
    with_idx = np.sort(np.concatenate([others, setup_idx]))
    X_eval, y_eval = X[eval_idx], y[eval_idx]

    def one_rep(i: int) -> tuple[float, float]:
        pipe_a = Pipeline(spec, random_state=fit_seed(seed, i, 0))
        pipe_a.fit(X[with_idx], y[with_idx])
        pipe_b = Pipeline(spec, random_state=fit_seed(seed, i, 1))
        pipe_b.fit(X[others], y[others])
        return (float(np.mean(pipe_a.predict(X_eval) == y_eval)),
                float(np.mean(pipe_b.predict(X_eval) == y_eval)))

    results = thread_map(one_rep, range(repetitions), threads)
    return FinetuneReport(
        participant_id=participant_id, t_w=_sample_t_w(samples),
        label_family=samples.spec.family, n_classes=samples.spec.n_classes,
        repetitions=repetitions,
        accuracies_with_setup=[a for a, _ in results],
        accuracies_without_setup=[b for _, b in results],
        n_setup=len(setup_idx), n_eval=len(eval_idx))
