"""Input validation helpers shared by the estimators."""

import numpy as np

from ..errors import GazetimeError


def check_matrix(X, name="X") -> np.ndarray:
    """Coerce to a C-contiguous float64 2-d array and reject empty/non-finite."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {X.shape}")
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise ValueError(f"{name} must be non-empty, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    return X


def check_labels(y, n_samples) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1 or len(y) != n_samples:
        raise ValueError(f"y must be 1-d with {n_samples} entries")
    return y.astype(np.int64)


def canonical_order(X, y=None) -> np.ndarray:
    """Row order independent of input permutation.

    Rows are sorted lexicographically by feature values (first column is the
    primary key) with the label as the final tie-break, so any permutation
    of identical (row, label) multisets produces the same training layout.
    Fitting on canonically ordered rows is what makes bootstrap draws and
    neighbor tie-breaks permutation invariant.
    """
    keys = [X[:, j] for j in range(X.shape[1] - 1, -1, -1)]
    if y is not None:
        keys.insert(0, y)
    return np.lexsort(tuple(keys))


class NotFittedError(GazetimeError, ValueError):
    pass


def check_fitted(estimator, attribute):
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"{type(estimator).__name__} must be fitted before this call")
