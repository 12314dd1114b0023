"""k-nearest-neighbor classifier with exact, deterministic tie handling."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ..errors import KExceedsNError
from ._validation import canonical_order, check_fitted, check_labels, check_matrix

_CHUNK = 64  # queries per distance block, bounds peak memory


class KNearestClassifier(BaseEstimator, ClassifierMixin):
    """Euclidean kNN with uniform or inverse-distance voting.

    Distances are computed from explicit coordinate differences (not the
    expanded dot-product form) so exact duplicates give a distance of
    exactly zero.  Neighbor ties at the k-th distance resolve by canonical
    training order; vote ties resolve toward the smallest class.
    """

    def __init__(self, n_neighbors=5, vote="uniform"):
        self.n_neighbors = n_neighbors
        self.vote = vote

    def fit(self, X, y):
        X = check_matrix(X)
        y = check_labels(y, X.shape[0])
        if self.vote not in ("uniform", "distance"):
            raise ValueError(f"unknown vote scheme {self.vote!r}")
        if self.n_neighbors < 1:
            raise ValueError("n_neighbors must be >= 1")
        if self.n_neighbors > X.shape[0]:
            raise KExceedsNError(
                f"n_neighbors {self.n_neighbors} exceeds {X.shape[0]} "
                "training samples")
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        order = canonical_order(X, y_enc)
        self.X_ = X[order]
        self.y_ = y_enc[order].astype(np.int64)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_fitted(self, "X_")
        X = check_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError("feature count differs from fit time")
        k = int(self.n_neighbors)
        n_classes = len(self.classes_)
        out = np.empty(X.shape[0], dtype=np.int64)
        for lo in range(0, X.shape[0], _CHUNK):
            chunk = X[lo:lo + _CHUNK]
            diff = chunk[:, None, :] - self.X_[None, :, :]
            d2 = np.einsum("qnf,qnf->qn", diff, diff)
            # stable sort: equal distances keep canonical training order
            nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
            for qi in range(chunk.shape[0]):
                idx = nearest[qi]
                dists = d2[qi, idx]
                labels = self.y_[idx]
                if self.vote == "distance" and np.any(dists == 0.0):
                    # exact duplicates dominate: vote only among them
                    labels = labels[dists == 0.0]
                    weights = np.ones(len(labels))
                elif self.vote == "distance":
                    weights = 1.0 / np.sqrt(dists)
                else:
                    weights = np.ones(len(labels))
                tally = np.zeros(n_classes)
                np.add.at(tally, labels, weights)
                out[lo + qi] = np.argmax(tally)  # first max: smallest class
        return self.classes_[out]

    def to_payload(self):
        check_fitted(self, "X_")
        return {"X": self.X_.tolist(), "y": self.y_.tolist(),
                "classes": self.classes_.tolist()}

    def _load_payload(self, payload, n_features):
        self.X_ = np.asarray(payload["X"], dtype=np.float64)
        self.y_ = np.asarray(payload["y"], dtype=np.int64)
        self.classes_ = np.asarray(payload["classes"])
        self.n_features_in_ = n_features
        return self
