"""Feature preprocessors for the pipeline search space.

Four kinds: identity, variance filtering, PCA projection and per-row unit
normalization.  All follow the sklearn transformer protocol.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..errors import AllColumnsDroppedError, KTooLargeError
from ._validation import check_fitted, check_matrix


class NoOpTransform(BaseEstimator, TransformerMixin):
    """Identity preprocessor (the 'none' pipeline slot)."""

    def fit(self, X, y=None):
        self.n_features_in_ = check_matrix(X).shape[1]
        return self

    def transform(self, X):
        check_fitted(self, "n_features_in_")
        return check_matrix(X)

    def to_payload(self):
        return {}

    def _load_payload(self, payload, n_features):
        self.n_features_in_ = n_features
        return self


class VarianceFilter(BaseEstimator, TransformerMixin):
    """Drop columns whose population variance is <= threshold."""

    def __init__(self, threshold=0.0):
        self.threshold = threshold

    def fit(self, X, y=None):
        X = check_matrix(X)
        self.n_features_in_ = X.shape[1]
        variances = X.var(axis=0)  # population convention (ddof=0)
        self.retained_ = np.flatnonzero(variances > self.threshold)
        if len(self.retained_) == 0:
            raise AllColumnsDroppedError(
                f"variance threshold {self.threshold} removed every column")
        return self

    def transform(self, X):
        check_fitted(self, "retained_")
        return check_matrix(X)[:, self.retained_]

    def to_payload(self):
        return {"retained": self.retained_.tolist()}

    def _load_payload(self, payload, n_features):
        self.n_features_in_ = n_features
        self.retained_ = np.asarray(payload["retained"], dtype=np.int64)
        return self


class PCAProjection(BaseEstimator, TransformerMixin):
    """Project onto the top-k right singular directions of the centered data.

    Requires k <= numerical rank of the centered training matrix, so that
    the retained directions are well defined; the sign of each component is
    fixed by making its largest-magnitude entry positive.
    """

    def __init__(self, n_components=10):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = check_matrix(X)
        self.n_features_in_ = X.shape[1]
        k = int(self.n_components)
        if k < 1:
            raise KTooLargeError(f"n_components must be >= 1, got {k}")
        self.mean_ = X.mean(axis=0)
        centered = X - self.mean_
        _, singulars, vt = np.linalg.svd(centered, full_matrices=False)
        tol = singulars.max(initial=0.0) * max(X.shape) * np.finfo(np.float64).eps
        rank = int(np.sum(singulars > tol))
        if k > rank:
            raise KTooLargeError(
                f"n_components {k} exceeds the training data rank {rank}")
        components = vt[:k]
        signs = np.sign(components[np.arange(k),
                                   np.argmax(np.abs(components), axis=1)])
        signs[signs == 0] = 1.0
        self.components_ = components * signs[:, None]
        return self

    def transform(self, X):
        check_fitted(self, "components_")
        X = check_matrix(X)
        return (X - self.mean_) @ self.components_.T

    def to_payload(self):
        return {"mean": self.mean_.tolist(),
                "components": self.components_.tolist()}

    def _load_payload(self, payload, n_features):
        self.n_features_in_ = n_features
        self.mean_ = np.asarray(payload["mean"], dtype=np.float64)
        self.components_ = np.asarray(payload["components"], dtype=np.float64)
        return self


class UnitNormScaler(BaseEstimator, TransformerMixin):
    """Scale each row to Euclidean length 1; zero rows pass through."""

    def fit(self, X, y=None):
        self.n_features_in_ = check_matrix(X).shape[1]
        return self

    def transform(self, X):
        check_fitted(self, "n_features_in_")
        X = check_matrix(X)
        norms = np.linalg.norm(X, axis=1)
        safe = np.where(norms == 0.0, 1.0, norms)
        return X / safe[:, None]

    def to_payload(self):
        return {}

    def _load_payload(self, payload, n_features):
        self.n_features_in_ = n_features
        return self
