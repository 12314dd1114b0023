"""Questionnaire answers to 2- or 3-class labels; slices inherit trial labels.

Two label families:

* ``duration``: the relative estimation error (estimated / actual trial
  length) thresholded at 0.9 for the binary problem and at (0.75, 1.05)
  for the 3-class problem.  Boundary membership is literal: 0.9 is an
  underestimate in the binary problem, while 0.75 and 1.05 both count as
  correct in the 3-class problem.
* ``ppot``: the 5-point perceived-passage-of-time answer (1 = "very slow"
  ... 5 = "very fast").  Binary: {1,2} slow, {3,4,5} fast.  3-class:
  {1,2} slow, {3} neutral, {4,5} fast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import (
    LikertOutOfRangeError,
    MissingQuestionnaireError,
    NonPositiveDurationError,
    SchemaMismatchError,
)
from .features import FEATURE_NAMES, PROVENANCE_COLUMNS
from .records import Dataset

DURATION_BINARY_THRESHOLD = 0.9
DURATION_TERNARY_THRESHOLDS = (0.75, 1.05)

CLASS_NAMES = {
    ("duration", 2): ("under", "over"),
    ("duration", 3): ("under", "correct", "over"),
    ("ppot", 2): ("slow", "fast"),
    ("ppot", 3): ("slow", "neutral", "fast"),
}

LABELS_CSV_COLUMNS = PROVENANCE_COLUMNS + (
    "family", "n_classes", "class_index", "class_name")


@dataclass(frozen=True)
class LabelSpec:
    family: str
    n_classes: int

    def __post_init__(self):
        if (self.family, self.n_classes) not in CLASS_NAMES:
            raise ValueError(
                f"unsupported label spec ({self.family!r}, {self.n_classes})")

    @property
    def thresholds(self) -> tuple[float, ...]:
        if self.family != "ppot":
            return ((DURATION_BINARY_THRESHOLD,) if self.n_classes == 2
                    else DURATION_TERNARY_THRESHOLDS)
        return ()

    @property
    def class_names(self) -> tuple[str, ...]:
        return CLASS_NAMES[(self.family, self.n_classes)]


def relative_estimation_error(estimated: float, actual: float) -> float:
    """Estimated over actual duration; < 1 means underestimation."""
    if actual <= 0:
        raise NonPositiveDurationError(
            f"actual duration must be positive, got {actual}")
    return estimated / actual


def duration_label(e_rel: float, n_classes: int) -> int:
    if n_classes == 2:
        return 0 if e_rel <= DURATION_BINARY_THRESHOLD else 1
    if n_classes == 3:
        lo, hi = DURATION_TERNARY_THRESHOLDS
        if e_rel < lo:
            return 0
        return 1 if e_rel <= hi else 2
    raise ValueError(f"n_classes must be 2 or 3, got {n_classes}")


def ppot_label(likert: int, n_classes: int) -> int:
    if likert not in (1, 2, 3, 4, 5):
        raise LikertOutOfRangeError(f"Likert answer must be 1..5, got {likert}")
    if n_classes == 2:
        return 0 if likert <= 2 else 1
    if n_classes == 3:
        if likert <= 2:
            return 0
        return 1 if likert == 3 else 2
    raise ValueError(f"n_classes must be 2 or 3, got {n_classes}")


def trial_label(estimated_duration: float, planned_duration: float,
                ppot_likert: int, spec: LabelSpec) -> int:
    if spec.family == "duration":
        e_rel = relative_estimation_error(estimated_duration, planned_duration)
        return duration_label(e_rel, spec.n_classes)
    return ppot_label(ppot_likert, spec.n_classes)


@dataclass
class SampleSet:
    """Labeled feature windows ready for learning.

    ``frame`` carries provenance, condition and label columns alongside the
    26 feature columns; ``spec`` identifies the label family and arity.
    """

    frame: pd.DataFrame
    spec: LabelSpec

    def __len__(self) -> int:
        return len(self.frame)

    @property
    def X(self) -> np.ndarray:
        return np.ascontiguousarray(
            self.frame[list(FEATURE_NAMES)].to_numpy(dtype=np.float64))

    @property
    def y(self) -> np.ndarray:
        return self.frame["class_index"].to_numpy(dtype=np.int64)

    def column(self, name: str) -> np.ndarray:
        return self.frame[name].to_numpy()

    def subset(self, indices) -> "SampleSet":
        return SampleSet(self.frame.iloc[np.asarray(indices)]
                         .reset_index(drop=True), self.spec)

    def class_counts(self) -> dict[str, int]:
        counts = {name: 0 for name in self.spec.class_names}
        for idx, n in zip(*np.unique(self.y, return_counts=True)):
            counts[self.spec.class_names[int(idx)]] = int(n)
        return counts

    @property
    def majority_share(self) -> float:
        if len(self) == 0:
            return float("nan")
        return max(self.class_counts().values()) / len(self)

    def labels_frame(self) -> pd.DataFrame:
        return self.frame[list(LABELS_CSV_COLUMNS)]


def _label_with_answers(features: pd.DataFrame,
                        answers: dict[str, tuple[float, int]],
                        spec: LabelSpec) -> SampleSet:
    """Label every feature window from per-trial (estimate, likert) answers.

    The actual duration comes from the feature row's provenance.  Every
    window of a trial inherits that trial's label, so the result has
    exactly one row per feature row.
    """
    labels = np.empty(len(features), dtype=np.int64)
    planned = features["planned_duration_s"].to_numpy(dtype=np.float64)
    for pos, trial_id in enumerate(features["trial_id"]):
        if trial_id not in answers:
            raise MissingQuestionnaireError(
                f"no questionnaire answers for trial {trial_id!r}")
        est, likert = answers[trial_id]
        labels[pos] = trial_label(est, planned[pos], likert, spec)
    frame = features.copy()
    frame["family"] = spec.family
    frame["n_classes"] = spec.n_classes
    frame["class_index"] = labels
    frame["class_name"] = [spec.class_names[i] for i in labels]
    return SampleSet(frame, spec)


def label_dataset(features: pd.DataFrame, dataset: Dataset,
                  spec: LabelSpec) -> SampleSet:
    """Label feature windows from the questionnaire answers in a dataset."""
    answers = {t.trial_id: (t.estimated_duration, t.ppot_likert)
               for t in dataset.trials}
    return _label_with_answers(features, answers, spec)


def label_features(features: pd.DataFrame, questionnaire: pd.DataFrame,
                   spec: LabelSpec) -> SampleSet:
    """Label feature windows from a parsed questionnaire table."""
    answers = {row.trial_id: (float(row.estimated_duration_s),
                              int(row.ppot_likert))
               for row in questionnaire.itertuples(index=False)}
    return _label_with_answers(features, answers, spec)


def write_labels_csv(samples: SampleSet, path) -> None:
    samples.labels_frame().to_csv(path, index=False)


def read_labels_csv(path) -> pd.DataFrame:
    frame = pd.read_csv(path, dtype={"participant_id": str, "trial_id": str,
                                     "family": str, "class_name": str})
    if set(frame.columns) != set(LABELS_CSV_COLUMNS):
        raise SchemaMismatchError(path, LABELS_CSV_COLUMNS, frame.columns)
    return frame[list(LABELS_CSV_COLUMNS)]


def samples_from_frames(features: pd.DataFrame,
                        labels: pd.DataFrame) -> SampleSet:
    """Rebuild a SampleSet from features.csv + labels.csv contents."""
    families = labels["family"].unique()
    arities = labels["n_classes"].unique()
    if len(families) != 1 or len(arities) != 1:
        raise ValueError("labels file must hold exactly one family/arity")
    spec = LabelSpec(str(families[0]), int(arities[0]))
    key = list(PROVENANCE_COLUMNS)
    merged = features.merge(
        labels[key + ["family", "n_classes", "class_index", "class_name"]],
        on=key, how="left", validate="one_to_one")
    if merged["class_index"].isna().any():
        raise MissingQuestionnaireError(
            "labels file does not cover every feature row")
    merged["class_index"] = merged["class_index"].astype(np.int64)
    merged["n_classes"] = merged["n_classes"].astype(np.int64)
    return SampleSet(merged, spec)
