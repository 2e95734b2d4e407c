"""Histogram-based outlier score (HBOS, Goldstein & Dengel 2012).

Each feature gets an equal-width histogram over its training range. A point
scores the sum over features of ``-log(density)``, with Laplace-smoothed
densities ``(count + 1) / ((n + bins) * width)``. Values outside the
training range use ``count = 0``. A constant training feature uses
``(c + 1) / (n + 1)``, where ``c = n`` when the value equals the constant
and 0 otherwise.
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import ConstraintViolation
from ..validation import check_features, check_n_features, check_point, freeze
from .base import BaseDetector


@dataclass(frozen=True)
class HbosParams:
    bins: int = 10

    def __post_init__(self):
        b = self.bins
        if isinstance(b, bool) or not isinstance(b, (int, np.integer)) or b < 1:
            raise ConstraintViolation("bins", "bins >= 1 (integer)", b)


@dataclass(frozen=True)
class HbosModel:
    minimum: np.ndarray      # (d,)
    maximum: np.ndarray      # (d,)
    width: np.ndarray        # (d,), 0 where the feature is constant
    counts: np.ndarray       # (d, bins) training counts, each row sums to n
    n_samples: int
    bins: int

    @property
    def degenerate(self):
        return self.minimum == self.maximum

    @property
    def n_features(self):
        return self.minimum.shape[0]


def _bin_of(model, X):
    """Bin index per entry of ``X`` (m, d); -1 outside the training range."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        pos = np.floor((X - model.minimum) / model.width)
        # widths that under- or overflow: bin by position within the span
        span = model.maximum - model.minimum
        ratio = np.where(np.isfinite(span), (X - model.minimum) / span,
                         (X / 2 - model.minimum / 2) / (model.maximum / 2 - model.minimum / 2))
        scaled = np.floor(ratio * model.bins)
    extreme = ~((model.width > 0) & np.isfinite(model.width))
    pos = np.where(extreme & ~model.degenerate, scaled, pos)
    pos = np.where(np.isfinite(pos), pos, 0)
    # the maximum itself lands in the last bin
    b = np.clip(pos, 0, model.bins - 1).astype(np.int64)
    inside = (X >= model.minimum) & (X <= model.maximum)
    return np.where(inside, b, -1)


def hbos_fit(train, params):
    X = check_features(getattr(train, "features", train))
    n, d = X.shape
    b = params.bins
    minimum = X.min(axis=0)
    maximum = X.max(axis=0)
    with np.errstate(over="ignore"):
        width = (maximum - minimum) / b
    model = HbosModel(minimum, maximum, width, np.zeros((d, b), dtype=np.int64), n, b)
    bins = _bin_of(model, X)
    counts = np.zeros((d, b), dtype=np.int64)
    for j in range(d):
        if model.degenerate[j]:
            counts[j, 0] = n
        else:
            counts[j] = np.bincount(bins[:, j], minlength=b)
    for arr in (minimum, maximum, width, counts):
        freeze(arr)
    return HbosModel(minimum, maximum, width, counts, n, b)


def feature_scores(model, X):
    """Per-feature ``-log(density)`` terms, shape (m, d)."""
    m, d = X.shape
    bins = _bin_of(model, X)
    inside = bins >= 0
    count = np.where(inside, model.counts[np.arange(d), np.maximum(bins, 0)], 0)
    n, b = model.n_samples, model.bins
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        regular = (count + 1.0) / ((n + b) * model.width)
        terms = -np.log(regular)
        # same quantity in log space, for widths too small or large to divide by
        span = model.maximum - model.minimum
        log_span = np.where(np.isfinite(span), np.log(span),
                            np.log(model.maximum / 2 - model.minimum / 2) + np.log(2.0))
        log_width = log_span - np.log(float(b))
        fallback = np.log(float(n + b)) + log_width - np.log(count + 1.0)
    terms = np.where(np.isfinite(terms), terms, fallback)
    constant = np.where(X == model.minimum, n + 1.0, 1.0) / (n + 1.0)
    return np.where(model.degenerate, -np.log(constant), terms)


def hbos_score_batch(model, X):
    terms = feature_scores(model, X)
    total = terms[:, 0].copy()
    for j in range(1, terms.shape[1]):
        total += terms[:, j]
    return total


def hbos_score(model, point):
    point = check_point(point, model.n_features)
    return float(hbos_score_batch(model, point[None, :])[0])


class HBOSDetector(BaseDetector):
    """Histogram-based outlier score with equal-width bins.

    Parameters
    ----------
    bins : int, default=10
        Number of bins per feature.

    Training rows are scored against the histogram that includes them.
    """

    def __init__(self, bins=10):
        self.bins = bins

    def _fit(self, X):
        self.model_ = hbos_fit(X, HbosParams(self.bins))
        return hbos_score_batch(self.model_, X)

    def _score(self, X):
        check_n_features(X, self.model_.n_features)
        return hbos_score_batch(self.model_, X)
