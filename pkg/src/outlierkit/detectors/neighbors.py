"""Neighbor-based detectors: k-NN distance, Local Outlier Factor, radius count.

Each detector comes in two forms: a per-point function (``knn_score``,
``lof_score``, ``dnn_score``) that evaluates one query against an index, and
an estimator class that scores whole matrices through the batched index
queries. Both share the same reductions, so they agree exactly.

Training rows are scored with self-exclusion: a training row is never its
own neighbor. New rows are compared against the full training set.
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import ConstraintViolation, NonPositiveRadius
from ..index import NeighborIndex
from ..validation import freeze
from .base import BaseDetector, row_mean

REDUCTIONS = ("maximum", "mean", "median")

#: Local reachability density assigned when the mean reachability is zero.
LRD_CAP = 1e12


def _check_k(k):
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise ConstraintViolation("k", "k >= 1 (integer)", k)
    return int(k)


def _check_radius(radius):
    if radius is None:
        raise ConstraintViolation("radius", "radius > 0 (required)", radius)
    if isinstance(radius, bool) or not np.isfinite(radius) or radius <= 0:
        raise NonPositiveRadius(radius)
    return float(radius)


@dataclass(frozen=True)
class KnnParams:
    k: int = 5
    reduction: str = "mean"

    def __post_init__(self):
        _check_k(self.k)
        if self.reduction not in REDUCTIONS:
            raise ConstraintViolation("reduction", f"one of {', '.join(REDUCTIONS)}",
                                      self.reduction)


@dataclass(frozen=True)
class LofParams:
    k: int = 5

    def __post_init__(self):
        _check_k(self.k)


@dataclass(frozen=True)
class DnnParams:
    radius: float

    def __post_init__(self):
        _check_radius(self.radius)


def reduce_distances(distances, reduction):
    """Collapse sorted neighbor distances (m, k) to one value per row."""
    k = distances.shape[1]
    if reduction == "maximum":
        return distances[:, -1].copy()
    if reduction == "mean":
        return row_mean(distances)
    if reduction == "median":
        if k % 2:
            return distances[:, k // 2].copy()
        return (distances[:, k // 2 - 1] + distances[:, k // 2]) / 2.0
    raise ConstraintViolation("reduction", f"one of {', '.join(REDUCTIONS)}", reduction)


def _lrd(neighbor_idx, neighbor_dist, kdist):
    reach = np.maximum(kdist[neighbor_idx], neighbor_dist)
    mean_reach = row_mean(reach)
    with np.errstate(divide="ignore", over="ignore"):
        lrd = 1.0 / mean_reach
    # duplicates give zero reachability; keep densities finite
    return np.where((mean_reach == 0) | ~np.isfinite(lrd), LRD_CAP, lrd)


def _lof(neighbor_idx, own_lrd, train_lrd):
    return row_mean(train_lrd[neighbor_idx] / own_lrd[:, None])


# -- per-point functions ----------------------------------------------------


def knn_score(index, params, point, exclude=None):
    res = index.query_knn(point, params.k, exclude=exclude)
    return float(reduce_distances(res.distances[None, :], params.reduction)[0])


def lof_score(index, params, point, exclude=None):
    """LOF of one point relative to the training rows held in ``index``.

    The k-distances and densities of training rows are always computed with
    self-exclusion; only the query's own neighborhood honours ``exclude``.
    """
    kdist, train_lrd, _ = _lof_training_state(index, params.k)
    res = index.query_knn(point, params.k, exclude=exclude)
    idx, dist = res.indices[None, :], res.distances[None, :]
    own = _lrd(idx, dist, kdist)
    return float(_lof(idx, own, train_lrd)[0])


def dnn_score(index, params, point, exclude=None):
    count = len(index.query_radius(point, params.radius, exclude=exclude))
    return 1.0 / (count + 1)


def _lof_training_state(index, k, n_jobs=None):
    idx, dist = index.knn_batch(None, k, exclude_self=True, n_jobs=n_jobs)
    kdist = dist[:, -1].copy()
    return kdist, _lrd(idx, dist, kdist), idx


# -- estimators -------------------------------------------------------------


class _NeighborDetector(BaseDetector):
    def _build_index(self, X):
        self.index_ = NeighborIndex(X, mode=self.algorithm)
        return self.index_


class KNNDetector(_NeighborDetector):
    """Distance to the k nearest training neighbors, reduced to one score.

    Parameters
    ----------
    k : int, default=5
        Number of neighbors.
    reduction : {"mean", "maximum", "median"}, default="mean"
        How the k distances are combined. The median of an even number of
        distances is the mean of the two central ones.
    algorithm : {"tree", "brute"}, default="tree"
        Search path of the underlying index; does not change the scores.
    n_jobs : int, optional
        Threads used for batched queries.
    """

    def __init__(self, k=5, reduction="mean", algorithm="tree", n_jobs=None):
        self.k = k
        self.reduction = reduction
        self.algorithm = algorithm
        self.n_jobs = n_jobs

    def _fit(self, X):
        params = KnnParams(self.k, self.reduction)
        index = self._build_index(X)
        _, dist = index.knn_batch(None, params.k, exclude_self=True, n_jobs=self.n_jobs)
        return reduce_distances(dist, params.reduction)

    def _score(self, X):
        _, dist = self.index_.knn_batch(X, self.k, n_jobs=self.n_jobs)
        return reduce_distances(dist, self.reduction)


class LOFDetector(_NeighborDetector):
    """Local Outlier Factor (Breunig et al., 2000).

    ``LOF(p)`` is the mean ratio of the neighbors' local reachability density
    to that of ``p``. Inliers sit near 1; larger means more outlying. When all
    reachability distances of a point are zero (duplicates), its density is
    capped at :data:`LRD_CAP` so scores stay finite.
    """

    def __init__(self, k=5, algorithm="tree", n_jobs=None):
        self.k = k
        self.algorithm = algorithm
        self.n_jobs = n_jobs

    def _fit(self, X):
        params = LofParams(self.k)
        index = self._build_index(X)
        kdist, lrd, idx = _lof_training_state(index, params.k, self.n_jobs)
        self.kdist_ = freeze(kdist)
        self.lrd_ = freeze(lrd)
        return _lof(idx, lrd, lrd)

    def _score(self, X):
        idx, dist = self.index_.knn_batch(X, self.k, n_jobs=self.n_jobs)
        own = _lrd(idx, dist, self.kdist_)
        return _lof(idx, own, self.lrd_)


class DNNDetector(_NeighborDetector):
    """Radius-count detector: ``1 / (c + 1)`` with ``c`` neighbors within ``radius``.

    The boundary is inclusive. Isolated points score 1.0. The radius is in
    feature units and has no default.
    """

    def __init__(self, radius=None, algorithm="tree", n_jobs=None):
        self.radius = radius
        self.algorithm = algorithm
        self.n_jobs = n_jobs

    def _fit(self, X):
        params = DnnParams(_check_radius(self.radius))
        index = self._build_index(X)
        counts = index.radius_count_batch(None, params.radius, exclude_self=True,
                                          n_jobs=self.n_jobs)
        return 1.0 / (counts + 1.0)

    def _score(self, X):
        counts = self.index_.radius_count_batch(X, self.radius, n_jobs=self.n_jobs)
        return 1.0 / (counts + 1.0)

