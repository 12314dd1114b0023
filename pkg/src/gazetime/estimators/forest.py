"""Random-forest and extra-trees classifiers built on the numba kernels.

Both follow the sklearn estimator protocol (``fit``/``predict``/
``get_params``) so they compose with the wider ecosystem.  Per-tree seeds
are derived from (random_state, tree index) and training rows are brought
into a canonical order before any random draw, so fits are bit-identical
regardless of input row order or thread count.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from . import trees
from ._validation import canonical_order, check_fitted, check_labels, check_matrix


def tree_seed(random_state: int, tree_index: int) -> int:
    """Stable per-tree MT19937 seed."""
    ss = np.random.SeedSequence(entropy=random_state, spawn_key=(tree_index,))
    return int(ss.generate_state(1)[0])


def resolve_max_features(max_features, n_features: int) -> int:
    if max_features is None:
        count = n_features
    elif max_features == "sqrt":
        count = int(np.sqrt(n_features))
    elif max_features == "log2":
        count = int(np.log2(n_features))
    elif max_features == "half":
        count = n_features // 2
    elif isinstance(max_features, (int, np.integer)):
        count = int(max_features)
    else:
        raise ValueError(f"unsupported max_features: {max_features!r}")
    return min(max(count, 1), n_features)


class _ForestClassifier(BaseEstimator, ClassifierMixin):
    """Shared fit/predict machinery; subclasses fix the split strategy."""

    _random_thresholds = False

    def _fit_forest(self, X, y, n_trees, max_depth, min_samples_split,
                    max_features, bootstrap, random_state):
        X = check_matrix(X)
        y = check_labels(y, X.shape[0])
        if n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        self.n_features_in_ = X.shape[1]
        self.degenerate_ = len(self.classes_) < 2
        if self.degenerate_:
            # single-class training data: constant predictor, flagged not fatal
            self.tree_arrays_ = []
            self._pack()
            return self
        order = canonical_order(X, y_enc)
        Xc = np.ascontiguousarray(X[order])
        yc = np.ascontiguousarray(y_enc[order].astype(np.int64))
        depth = trees.UNLIMITED_DEPTH if max_depth is None else int(max_depth)
        if depth < 1:
            raise ValueError("max_depth must be >= 1 or None")
        k = resolve_max_features(max_features, X.shape[1])
        self.tree_arrays_ = [
            trees.build_tree(Xc, yc, len(self.classes_),
                             tree_seed(random_state, t), depth,
                             int(min_samples_split), k, bool(bootstrap),
                             self._random_thresholds)
            for t in range(int(n_trees))
        ]
        self._pack()
        return self

    def _pack(self):
        """Concatenate per-tree arrays for the voting kernel."""
        sizes = [len(t[0]) for t in self.tree_arrays_]
        self._offsets = np.cumsum([0] + sizes).astype(np.int64)
        if sizes:
            self._feature = np.concatenate([t[0] for t in self.tree_arrays_])
            self._threshold = np.concatenate([t[1] for t in self.tree_arrays_])
            self._left = np.concatenate([t[2] for t in self.tree_arrays_])
            self._right = np.concatenate([t[3] for t in self.tree_arrays_])
            self._leaf = np.concatenate([t[4] for t in self.tree_arrays_])
        else:
            self._feature = np.zeros(0, np.int64)
            self._threshold = np.zeros(0, np.float64)
            self._left = np.zeros(0, np.int64)
            self._right = np.zeros(0, np.int64)
            self._leaf = np.zeros(0, np.int64)

    def predict(self, X) -> np.ndarray:
        check_fitted(self, "classes_")
        X = check_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError("feature count differs from fit time")
        if self.degenerate_:
            return np.full(X.shape[0], self.classes_[0])
        votes = trees.forest_votes(X, self._feature, self._threshold,
                                   self._left, self._right, self._leaf,
                                   self._offsets, len(self.classes_))
        # np.argmax keeps the first maximum: ties go to the smallest class
        return self.classes_[np.argmax(votes, axis=1)]

    def to_payload(self) -> dict:
        check_fitted(self, "classes_")
        return {
            "classes": self.classes_.tolist(),
            "n_features": int(self.n_features_in_),
            "degenerate": bool(self.degenerate_),
            "trees": [
                {
                    "feature": t[0].tolist(),
                    "threshold": t[1].tolist(),
                    "left": t[2].tolist(),
                    "right": t[3].tolist(),
                    "leaf_class": t[4].tolist(),
                }
                for t in self.tree_arrays_
            ],
        }

    def _load_payload(self, payload: dict):
        self.classes_ = np.asarray(payload["classes"])
        self.n_features_in_ = int(payload["n_features"])
        self.degenerate_ = bool(payload["degenerate"])
        self.tree_arrays_ = [
            (np.asarray(t["feature"], np.int64),
             np.asarray(t["threshold"], np.float64),
             np.asarray(t["left"], np.int64),
             np.asarray(t["right"], np.int64),
             np.asarray(t["leaf_class"], np.int64))
            for t in payload["trees"]
        ]
        self._pack()
        return self


class RandomForest(_ForestClassifier):
    """Bagged CART trees with exhaustive Gini split search."""

    _random_thresholds = False

    def __init__(self, n_trees=100, max_depth=None, min_samples_split=2,
                 max_features="sqrt", bootstrap=True, random_state=0):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.random_state = random_state

    def fit(self, X, y):
        return self._fit_forest(X, y, self.n_trees, self.max_depth,
                                self.min_samples_split, self.max_features,
                                self.bootstrap, self.random_state)


class ExtraTrees(_ForestClassifier):
    """Extremely randomized trees: full sample, one random threshold per
    candidate feature."""

    _random_thresholds = True

    def __init__(self, n_trees=100, max_depth=None, min_samples_split=2,
                 max_features="sqrt", bootstrap=False, random_state=0):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.random_state = random_state

    def fit(self, X, y):
        return self._fit_forest(X, y, self.n_trees, self.max_depth,
                                self.min_samples_split, self.max_features,
                                self.bootstrap, self.random_state)
