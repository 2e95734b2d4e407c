"""Input validation helpers shared by detectors, conversion and ingestion."""

import numpy as np

from .exceptions import DimensionMismatch, EmptyData, NonFiniteValue, NotFitted


def check_features(X, *, allow_empty=False, copy=False):
    """Return ``X`` as a C-contiguous float64 matrix of finite values.

    A 1-D input is read as a single feature column. The first non-finite entry
    is reported by (row, column) in row-major order.
    """
    if copy:
        X = np.array(X, dtype=np.float64, order="C")
    else:
        X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise EmptyData(f"expected a 2-D feature matrix, got {X.ndim} dimensions")
    n, d = X.shape
    if d == 0 or (n == 0 and not allow_empty):
        raise EmptyData(f"feature matrix must have at least one row and column, got {n}x{d}")
    finite = np.isfinite(X)
    if not finite.all():
        row, col = np.argwhere(~finite)[0]
        raise NonFiniteValue(int(row), int(col))
    return X


def check_point(point, n_features):
    point = np.asarray(point, dtype=np.float64).reshape(-1)
    if point.shape[0] != n_features:
        raise DimensionMismatch(n_features, point.shape[0])
    if not np.isfinite(point).all():
        raise NonFiniteValue(0, int(np.argmin(np.isfinite(point))))
    return np.ascontiguousarray(point)


def check_n_features(X, n_features):
    if X.shape[1] != n_features:
        raise DimensionMismatch(n_features, X.shape[1])


def check_scores(scores, *, name="scores"):
    """1-D float64 view of a score vector; every value must be finite."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1:
        scores = scores.reshape(-1)
    if not np.isfinite(scores).all():
        raise NonFiniteValue(int(np.argmin(np.isfinite(scores))), 0)
    return scores


def check_is_fitted(estimator, attribute):
    if not hasattr(estimator, attribute):
        raise NotFitted(
            f"{type(estimator).__name__} is not fitted yet; call fit() first"
        )


def freeze(array):
    """Mark an array read-only so fitted state cannot be mutated by scoring."""
    array.setflags(write=False)
    return array
