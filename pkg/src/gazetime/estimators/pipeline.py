"""Pipeline specification, fitting, evaluation and serialization.

A pipeline is one preprocessor followed by one classifier.  Fitted
pipelines serialize to a self-describing versioned JSON document whose
bytes are reproducible given (data, spec, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..splitting import stratified_indices
from ..errors import StratificationImpossibleError
from ._validation import check_labels, check_matrix
from .forest import ExtraTrees, RandomForest
from .neighbors import KNearestClassifier
from .preprocessing import (
    NoOpTransform,
    PCAProjection,
    UnitNormScaler,
    VarianceFilter,
)

PAYLOAD_FORMAT = "gazetime-pipeline"
PAYLOAD_VERSION = 1

PREPROCESSOR_KINDS = ("none", "variance_threshold", "pca", "unit_norm")
CLASSIFIER_KINDS = ("random_forest", "extra_trees", "knn")

_PRE_BUILDERS = {
    "none": lambda params: NoOpTransform(),
    "variance_threshold": lambda params: VarianceFilter(**params),
    "pca": lambda params: PCAProjection(**params),
    "unit_norm": lambda params: UnitNormScaler(),
}
_CLF_BUILDERS = {
    "random_forest": RandomForest,
    "extra_trees": ExtraTrees,
    "knn": lambda **kw: KNearestClassifier(**kw),
}


def default_preprocessor_params(kind: str, n_features: int) -> dict:
    if kind == "variance_threshold":
        return {"threshold": 0.0}
    if kind == "pca":
        return {"n_components": min(10, n_features)}
    return {}


def default_classifier_params(kind: str) -> dict:
    if kind in ("random_forest", "extra_trees"):
        return {"n_trees": 100, "max_depth": None, "min_samples_split": 2,
                "max_features": "sqrt"}
    if kind == "knn":
        return {"n_neighbors": 5, "vote": "uniform"}
    raise ValueError(f"unknown classifier kind {kind!r}")


@dataclass(frozen=True)
class PipelineSpec:
    preprocessor: str
    classifier: str
    preprocessor_params: dict = field(default_factory=dict)
    classifier_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.preprocessor not in PREPROCESSOR_KINDS:
            raise ValueError(f"unknown preprocessor {self.preprocessor!r}")
        if self.classifier not in CLASSIFIER_KINDS:
            raise ValueError(f"unknown classifier {self.classifier!r}")

    def to_dict(self) -> dict:
        return {"preprocessor": self.preprocessor,
                "preprocessor_params": dict(self.preprocessor_params),
                "classifier": self.classifier,
                "classifier_params": dict(self.classifier_params)}

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineSpec":
        return cls(preprocessor=d["preprocessor"],
                   classifier=d["classifier"],
                   preprocessor_params=dict(d.get("preprocessor_params", {})),
                   classifier_params=dict(d.get("classifier_params", {})))

    @classmethod
    def with_defaults(cls, preprocessor: str, classifier: str,
                      n_features: int) -> "PipelineSpec":
        return cls(preprocessor, classifier,
                   default_preprocessor_params(preprocessor, n_features),
                   default_classifier_params(classifier))


class Pipeline:
    """A preprocessor/classifier pair that fits and predicts as one unit."""

    def __init__(self, spec: PipelineSpec, random_state: int = 0):
        self.spec = spec
        self.random_state = int(random_state)
        self._pre = None
        self._clf = None

    def fit(self, X, y) -> "Pipeline":
        X = check_matrix(X)
        y = check_labels(y, X.shape[0])
        self._pre = _PRE_BUILDERS[self.spec.preprocessor](
            dict(self.spec.preprocessor_params))
        Xp = self._pre.fit(X, y).transform(X)
        clf_params = dict(self.spec.classifier_params)
        if self.spec.classifier != "knn":
            clf_params["random_state"] = self.random_state
        self._clf = _CLF_BUILDERS[self.spec.classifier](**clf_params)
        self._clf.fit(Xp, y)
        return self

    def predict(self, X) -> np.ndarray:
        if self._clf is None:
            raise ValueError("pipeline is not fitted")
        return self._clf.predict(self._pre.transform(check_matrix(X)))

    def score(self, X, y) -> float:
        y = np.asarray(y)
        return float(np.mean(self.predict(X) == y))

    @property
    def degenerate(self) -> bool:
        return bool(getattr(self._clf, "degenerate_", False))

    def to_payload(self) -> dict:
        if self._clf is None:
            raise ValueError("pipeline is not fitted")
        return {
            "format": PAYLOAD_FORMAT,
            "version": PAYLOAD_VERSION,
            "spec": self.spec.to_dict(),
            "random_state": self.random_state,
            "n_features_in": int(self._pre.n_features_in_),
            "preprocessor_state": self._pre.to_payload(),
            "classifier_state": self._clf.to_payload(),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Pipeline":
        if payload.get("format") != PAYLOAD_FORMAT:
            raise ValueError("not a gazetime pipeline document")
        if payload.get("version") != PAYLOAD_VERSION:
            raise ValueError(f"unsupported pipeline version "
                             f"{payload.get('version')}")
        spec = PipelineSpec.from_dict(payload["spec"])
        pipe = cls(spec, payload["random_state"])
        n_features = payload["n_features_in"]
        pipe._pre = _PRE_BUILDERS[spec.preprocessor](
            dict(spec.preprocessor_params))
        pipe._pre._load_payload(payload["preprocessor_state"], n_features)
        if spec.classifier == "knn":
            pipe._clf = KNearestClassifier(**spec.classifier_params)
        else:
            pipe._clf = _CLF_BUILDERS[spec.classifier](
                **dict(spec.classifier_params),
                random_state=payload["random_state"])
        n_transformed = payload["classifier_state"].get("n_features")
        if n_transformed is None:  # knn payload infers width from the store
            n_transformed = len(payload["classifier_state"]["X"][0])
        pipe._clf._load_payload(payload["classifier_state"], n_transformed)
        return pipe


def pipeline_to_json(pipe: Pipeline) -> str:
    return json.dumps(pipe.to_payload(), sort_keys=True,
                      separators=(",", ":"))


def pipeline_from_json(text: str) -> Pipeline:
    return Pipeline.from_payload(json.loads(text))


def save_pipeline(pipe: Pipeline, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(pipeline_to_json(pipe))


def load_pipeline(path) -> Pipeline:
    with open(path, encoding="utf-8") as fh:
        return pipeline_from_json(fh.read())


def fit_seed(seed: int, *key: int) -> int:
    """Stable derived seed for one fit inside a seeded procedure."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))
    return int(ss.generate_state(1)[0])


def evaluate_pipeline(spec: PipelineSpec, X, y, n_splits: int = 5,
                      train_fraction: float = 0.8,
                      seed: int = 0) -> tuple[float, list[float]]:
    """Mean validation accuracy over independent stratified splits.

    Split i uses rng (seed, i) and fit seed (seed, i, 1), so two specs
    evaluated with the same seed see identical train/validation splits
    (paired comparisons).  Raises StratificationImpossibleError when some
    class cannot appear on both sides; fit errors propagate to the caller.
    """
    X = check_matrix(X)
    y = check_labels(y, X.shape[0])
    if len(np.unique(y)) < 2:
        raise StratificationImpossibleError(
            "pipeline evaluation needs at least two classes")
    accuracies = []
    for i in range(int(n_splits)):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(i,)))
        train_idx, val_idx = stratified_indices(y, 1.0 - train_fraction, rng)
        pipe = Pipeline(spec, random_state=fit_seed(seed, i, 1))
        pipe.fit(X[train_idx], y[train_idx])
        accuracies.append(pipe.score(X[val_idx], y[val_idx]))
    return float(np.mean(accuracies)), accuracies
