"""Exact Euclidean nearest-neighbor and radius search.

Two interchangeable search paths sit behind :class:`NeighborIndex`:

``brute``
    a linear scan over all training rows;
``tree``
    a k-d tree that splits each node at the median of its widest-spread
    dimension, down to leaves of at most :data:`LEAF_SIZE` rows.

Results are ordered by ascending distance, ties by ascending training-row
index, and both paths return exactly the same indices and distances.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import KTooLarge, NonPositiveRadius
from .validation import check_features, check_n_features, check_point, freeze

LEAF_SIZE = 16
MODES = ("brute", "tree")

_NO_EXCLUDE = -1


@dataclass(frozen=True)
class NeighborResult:
    indices: np.ndarray
    distances: np.ndarray

    def __len__(self):
        return len(self.indices)


class _Tree:
    __slots__ = ("tpoints", "perm", "start", "end", "left", "right", "lo", "hi")

    def __init__(self, points, leaf_size):
        n, d = points.shape
        max_nodes = max(1, 2 * (n // max(1, leaf_size // 2)) + 1)
        start = np.empty(max_nodes, dtype=np.int64)
        end = np.empty(max_nodes, dtype=np.int64)
        left = np.full(max_nodes, -1, dtype=np.int64)
        right = np.full(max_nodes, -1, dtype=np.int64)
        lo = np.empty((max_nodes, d))
        hi = np.empty((max_nodes, d))
        perm = np.arange(n, dtype=np.int64)

        count = 1
        start[0], end[0] = 0, n
        todo = [0]
        while todo:
            node = todo.pop()
            s, e = start[node], end[node]
            block = points[perm[s:e]]
            lo[node] = block.min(axis=0)
            hi[node] = block.max(axis=0)
            if e - s <= leaf_size:
                continue
            dim = int(np.argmax(hi[node] - lo[node]))
            # stable on row index so the layout is a pure function of the data
            order = np.lexsort((perm[s:e], block[:, dim]))
            perm[s:e] = perm[s:e][order]
            mid = s + (e - s) // 2
            a, b = count, count + 1
            count += 2
            start[a], end[a] = s, mid
            start[b], end[b] = mid, e
            left[node], right[node] = a, b
            todo.extend((b, a))

        self.tpoints = freeze(np.ascontiguousarray(points[perm]))
        self.perm = freeze(perm)
        self.start = freeze(start[:count].copy())
        self.end = freeze(end[:count].copy())
        self.left = freeze(left[:count].copy())
        self.right = freeze(right[:count].copy())
        self.lo = freeze(np.ascontiguousarray(lo[:count]))
        self.hi = freeze(np.ascontiguousarray(hi[:count]))

    @property
    def arrays(self):
        return (self.tpoints, self.perm, self.start, self.end, self.left, self.right,
                self.lo, self.hi)

    @property
    def n_nodes(self):
        return self.left.shape[0]


class NeighborIndex:
    """Immutable search structure over a copy of the training matrix.

    Parameters
    ----------
    points : array-like of shape (n, d)
        Training matrix. It is copied and frozen.
    mode : {"tree", "brute"}
        Search path. Results do not depend on it.
    leaf_size : int
        Maximum number of rows in a tree leaf.
    """

    def __init__(self, points, mode="tree", leaf_size=LEAF_SIZE):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        self.points = freeze(check_features(points, copy=True))
        self.mode = mode
        self.leaf_size = int(leaf_size)
        self._tree = _Tree(self.points, self.leaf_size) if mode == "tree" else None

    @property
    def n_samples(self):
        return self.points.shape[0]

    @property
    def n_features(self):
        return self.points.shape[1]

    @property
    def n_nodes(self):
        return self._tree.n_nodes if self._tree is not None else 0

    def __repr__(self):
        return f"NeighborIndex(n={self.n_samples}, d={self.n_features}, mode={self.mode!r})"

    # -- single queries ---------------------------------------------------

    def query_knn(self, point, k, exclude=None):
        """The ``k`` nearest training rows to ``point``, never returning ``exclude``."""
        point = check_point(point, self.n_features)
        ex = self._check_exclude(exclude)
        k = self._check_k(k, excluding=ex != _NO_EXCLUDE)
        best_i = np.empty(k, dtype=np.int64)
        best_d = np.empty(k, dtype=np.float64)
        if self._tree is None:
            _kernels.brute_knn_one(self.points, point, k, ex, best_d, best_i)
        else:
            stack = np.empty(_kernels.STACK_SIZE, dtype=np.int64)
            bounds = np.empty(_kernels.STACK_SIZE, dtype=np.float64)
            _kernels.tree_knn_one(*self._tree.arrays, point, k, ex, best_d, best_i,
                                  stack, bounds)
        return NeighborResult(best_i, best_d)

    def query_radius(self, point, radius, exclude=None):
        """All training rows within ``radius`` of ``point`` (boundary included)."""
        point = check_point(point, self.n_features)
        radius = _check_radius(radius)
        ex = self._check_exclude(exclude)
        if self._tree is None:
            idx, dist = _kernels.brute_radius_one(self.points, point, radius, ex)
        else:
            idx, dist = _kernels.tree_radius_one(*self._tree.arrays, point, radius, ex)
        return NeighborResult(idx, dist)

    # -- batched queries (used by the detectors) --------------------------

    def knn_batch(self, queries, k, exclude_self=False, n_jobs=None):
        """Row-wise :meth:`query_knn` over a query matrix.

        With ``exclude_self`` the training rows themselves are queried (the
        ``queries`` argument is ignored) and row ``i`` never sees itself.
        ``n_jobs`` threads each take a contiguous block of queries; the output
        does not depend on it.

        Returns ``(indices, distances)``, both of shape (m, k).
        """
        queries, exclude = self._prepare_batch(queries, exclude_self)
        k = self._check_k(k, excluding=exclude_self)
        if self._tree is None:
            def run(q, ex):
                return _kernels.brute_knn_batch(self.points, q, k, ex)
        else:
            def run(q, ex):
                return _kernels.tree_knn_batch(*self._tree.arrays, q, k, ex)
        parts = _map_blocks(run, queries, exclude, n_jobs)
        return (np.concatenate([p[0] for p in parts]).reshape(-1, k),
                np.concatenate([p[1] for p in parts]).reshape(-1, k))

    def radius_count_batch(self, queries, radius, exclude_self=False, n_jobs=None):
        """Number of training rows within ``radius`` of each query row."""
        queries, exclude = self._prepare_batch(queries, exclude_self)
        radius = _check_radius(radius)
        if self._tree is None:
            def run(q, ex):
                return _kernels.brute_radius_count_batch(self.points, q, radius, ex)
        else:
            def run(q, ex):
                return _kernels.tree_radius_count_batch(*self._tree.arrays, q, radius, ex)
        return np.concatenate(_map_blocks(run, queries, exclude, n_jobs))

    # -- helpers ----------------------------------------------------------

    def _prepare_batch(self, queries, exclude_self):
        if exclude_self:
            queries = self.points
            exclude = np.arange(self.n_samples, dtype=np.int64)
        else:
            queries = check_features(queries, allow_empty=True)
            check_n_features(queries, self.n_features)
            exclude = np.full(queries.shape[0], _NO_EXCLUDE, dtype=np.int64)
        return queries, exclude

    def _check_k(self, k, excluding):
        if isinstance(k, bool) or int(k) != k or k < 1:
            raise ValueError(f"k must be a positive integer, got {k!r}")
        k = int(k)
        available = self.n_samples - (1 if excluding else 0)
        if k > available:
            raise KTooLarge(k, available)
        return k

    def _check_exclude(self, exclude):
        if exclude is None:
            return _NO_EXCLUDE
        exclude = int(exclude)
        if not 0 <= exclude < self.n_samples:
            raise IndexError(f"exclude={exclude} is not a training row index")
        return exclude


def _map_blocks(run, queries, exclude, n_jobs):
    n_jobs = 1 if n_jobs is None else int(n_jobs)
    if n_jobs == -1:
        n_jobs = os.cpu_count() or 1
    m = queries.shape[0]
    if n_jobs <= 1 or m < 2 * n_jobs:
        return [run(queries, exclude)]
    cuts = np.linspace(0, m, n_jobs + 1).astype(int)
    blocks = [(queries[a:b], exclude[a:b]) for a, b in zip(cuts[:-1], cuts[1:])]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        # map() yields in submission order, so assembly is by block position
        return list(pool.map(lambda blk: run(*blk), blocks))


def _check_radius(radius):
    radius = float(radius)
    if not radius > 0 or not np.isfinite(radius):
        raise NonPositiveRadius(radius)
    return radius


def build_index(train, mode="tree"):
    """Build a :class:`NeighborIndex` over a :class:`~outlierkit.core.Dataset` or matrix."""
    features = getattr(train, "features", train)
    return NeighborIndex(features, mode=mode)


def query_knn(index, point, k, exclude=None):
    return index.query_knn(point, k, exclude=exclude)


def query_radius(index, point, radius, exclude=None):
    return index.query_radius(point, radius, exclude=exclude)
