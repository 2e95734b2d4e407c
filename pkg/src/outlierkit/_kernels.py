"""Compiled neighbor-search kernels.

Both search paths (linear scan and k-d tree) go through :func:`pair_distance`,
which sums squared coordinate differences in ascending dimension order and
takes one square root. Nothing here is compiled with fast-math, so no
reassociation or FMA contraction happens and the two paths produce
bit-identical distances for the same pair.

Candidates are ranked by the key ``(distance, row index)``.
"""

import math

import numpy as np
from numba import njit

CACHE = True
# Depth-first traversal holds at most one pending sibling per level plus the
# node just pushed; median splits keep the depth below 64 for any int64 n.
STACK_SIZE = 130


@njit(cache=CACHE, inline="always")
def pair_distance(points, row, query):
    acc = 0.0
    for j in range(query.shape[0]):
        diff = points[row, j] - query[j]
        acc += diff * diff
    return math.sqrt(acc)


@njit(cache=CACHE, inline="always")
def box_distance(lo, hi, node, query):
    # Lower bound on pair_distance for every point in the node's bounding box;
    # rounding is monotone, so the bound never exceeds a computed distance.
    acc = 0.0
    for j in range(query.shape[0]):
        q = query[j]
        if q < lo[node, j]:
            diff = lo[node, j] - q
        elif q > hi[node, j]:
            diff = q - hi[node, j]
        else:
            diff = 0.0
        acc += diff * diff
    return math.sqrt(acc)


@njit(cache=CACHE, inline="always")
def _offer(best_d, best_i, filled, k, dist, idx):
    """Insert (dist, idx) into the sorted top-k buffers; returns the new fill."""
    if filled == k:
        last = k - 1
        if dist > best_d[last] or (dist == best_d[last] and idx > best_i[last]):
            return filled
        pos = last
    else:
        pos = filled
        filled += 1
    while pos > 0 and (
        dist < best_d[pos - 1] or (dist == best_d[pos - 1] and idx < best_i[pos - 1])
    ):
        best_d[pos] = best_d[pos - 1]
        best_i[pos] = best_i[pos - 1]
        pos -= 1
    best_d[pos] = dist
    best_i[pos] = idx
    return filled


# -- brute force ------------------------------------------------------------


@njit(cache=CACHE, nogil=True)
def brute_knn_one(points, query, k, exclude, best_d, best_i):
    filled = 0
    for i in range(points.shape[0]):
        if i == exclude:
            continue
        filled = _offer(best_d, best_i, filled, k, pair_distance(points, i, query), i)


@njit(cache=CACHE, nogil=True)
def brute_knn_batch(points, queries, k, exclude):
    m = queries.shape[0]
    out_i = np.empty((m, k), dtype=np.int64)
    out_d = np.empty((m, k), dtype=np.float64)
    for q in range(m):
        brute_knn_one(points, queries[q], k, exclude[q], out_d[q], out_i[q])
    return out_i, out_d


@njit(cache=CACHE, nogil=True)
def brute_radius_one(points, query, radius, exclude):
    n = points.shape[0]
    buf_i = np.empty(n, dtype=np.int64)
    buf_d = np.empty(n, dtype=np.float64)
    c = 0
    for i in range(n):
        if i == exclude:
            continue
        dist = pair_distance(points, i, query)
        if dist <= radius:
            buf_i[c] = i
            buf_d[c] = dist
            c += 1
    order = np.argsort(buf_d[:c], kind="mergesort")
    return buf_i[:c][order], buf_d[:c][order]


@njit(cache=CACHE, nogil=True)
def brute_radius_count_batch(points, queries, radius, exclude):
    m = queries.shape[0]
    out = np.zeros(m, dtype=np.int64)
    for q in range(m):
        c = 0
        for i in range(points.shape[0]):
            if i != exclude[q] and pair_distance(points, i, queries[q]) <= radius:
                c += 1
        out[q] = c
    return out


# -- k-d tree ---------------------------------------------------------------
#
# Layout: ``tpoints`` holds the training rows reordered so that node ``v``
# covers ``tpoints[start[v]:end[v]]``; ``perm`` maps tree order back to the
# original row index. ``left[v] == -1`` marks a leaf.


@njit(cache=CACHE, nogil=True)
def tree_knn_one(tpoints, perm, start, end, left, right, lo, hi, query, k, exclude,
                 best_d, best_i, stack, bounds):
    stack[0] = 0
    bounds[0] = box_distance(lo, hi, 0, query)
    top = 1
    filled = 0
    while top > 0:
        top -= 1
        node = stack[top]
        # a tie with the current worst can still win on row index, so prune strictly
        if filled == k and bounds[top] > best_d[k - 1]:
            continue
        if left[node] == -1:
            for p in range(start[node], end[node]):
                idx = perm[p]
                if idx == exclude:
                    continue
                filled = _offer(best_d, best_i, filled, k,
                                pair_distance(tpoints, p, query), idx)
            continue
        a = left[node]
        b = right[node]
        da = box_distance(lo, hi, a, query)
        db = box_distance(lo, hi, b, query)
        if da <= db:
            near, far, dn, df = a, b, da, db
        else:
            near, far, dn, df = b, a, db, da
        stack[top] = far
        bounds[top] = df
        top += 1
        stack[top] = near
        bounds[top] = dn
        top += 1


@njit(cache=CACHE, nogil=True)
def tree_knn_batch(tpoints, perm, start, end, left, right, lo, hi, queries, k, exclude):
    m = queries.shape[0]
    out_i = np.empty((m, k), dtype=np.int64)
    out_d = np.empty((m, k), dtype=np.float64)
    stack = np.empty(STACK_SIZE, dtype=np.int64)
    bounds = np.empty(STACK_SIZE, dtype=np.float64)
    for q in range(m):
        tree_knn_one(tpoints, perm, start, end, left, right, lo, hi, queries[q], k,
                     exclude[q], out_d[q], out_i[q], stack, bounds)
    return out_i, out_d


@njit(cache=CACHE, nogil=True)
def _tree_radius_scan(tpoints, perm, start, end, left, right, lo, hi, query, radius,
                      exclude, buf_i, buf_d, stack):
    stack[0] = 0
    top = 1
    c = 0
    while top > 0:
        top -= 1
        node = stack[top]
        if box_distance(lo, hi, node, query) > radius:
            continue
        if left[node] == -1:
            for p in range(start[node], end[node]):
                idx = perm[p]
                if idx == exclude:
                    continue
                dist = pair_distance(tpoints, p, query)
                if dist <= radius:
                    if buf_i.shape[0] > 0:
                        buf_i[c] = idx
                        buf_d[c] = dist
                    c += 1
            continue
        stack[top] = left[node]
        top += 1
        stack[top] = right[node]
        top += 1
    return c


@njit(cache=CACHE, nogil=True)
def tree_radius_one(tpoints, perm, start, end, left, right, lo, hi, query, radius,
                    exclude):
    n = tpoints.shape[0]
    buf_i = np.empty(n, dtype=np.int64)
    buf_d = np.empty(n, dtype=np.float64)
    stack = np.empty(STACK_SIZE, dtype=np.int64)
    c = _tree_radius_scan(tpoints, perm, start, end, left, right, lo, hi, query,
                          radius, exclude, buf_i, buf_d, stack)
    idx = buf_i[:c]
    dist = buf_d[:c]
    by_index = np.argsort(idx, kind="mergesort")
    idx = idx[by_index]
    dist = dist[by_index]
    order = np.argsort(dist, kind="mergesort")
    return idx[order], dist[order]


@njit(cache=CACHE, nogil=True)
def tree_radius_count_batch(tpoints, perm, start, end, left, right, lo, hi, queries,
                            radius, exclude):
    m = queries.shape[0]
    out = np.zeros(m, dtype=np.int64)
    empty_i = np.empty(0, dtype=np.int64)
    empty_d = np.empty(0, dtype=np.float64)
    stack = np.empty(STACK_SIZE, dtype=np.int64)
    for q in range(m):
        out[q] = _tree_radius_scan(tpoints, perm, start, end, left, right, lo, hi,
                                   queries[q], radius, exclude[q], empty_i, empty_d,
                                   stack)
    return out
