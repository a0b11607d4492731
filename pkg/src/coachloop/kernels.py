"""Hot numeric kernels: pairwise distances, cluster assignment, KNN ordering.

Compiled with numba's ``@njit`` by default. Set ``COACHLOOP_DISABLE_JIT=1``
to select the pure-numpy fallbacks instead (useful for debugging and as the
baseline in ``benchmarks/bench_kernels.py``). Both paths are kept in sync and
tested for bitwise-identical results.
"""

from __future__ import annotations

import os

import numpy as np

JIT_ENABLED = os.environ.get("COACHLOOP_DISABLE_JIT", "").lower() not in (
    "1",
    "true",
    "yes",
)


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def sq_dist_numpy(a: np.ndarray, b: np.ndarray) -> float:
    diff = a - b
    return float(np.dot(diff, diff))


def pairwise_sq_dists_numpy(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    return np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)


def assign_labels_numpy(points: np.ndarray, centers: np.ndarray):
    """Nearest-center label per point (ties -> lowest index) and the
    squared distance to that center."""
    d2 = pairwise_sq_dists_numpy(points, centers)
    labels = np.argmin(d2, axis=1).astype(np.int64)
    return labels, d2[np.arange(points.shape[0]), labels]


def update_centroids_numpy(points: np.ndarray, labels: np.ndarray, k: int):
    """Member-mean centroid per cluster plus member counts. Empty clusters
    keep a zero row; callers must repair them."""
    d = points.shape[1]
    sums = np.zeros((k, d), dtype=np.float64)
    counts = np.zeros(k, dtype=np.int64)
    # fixed accumulation order: row order of `points`
    for i in range(points.shape[0]):
        sums[labels[i]] += points[i]
        counts[labels[i]] += 1
    centers = np.zeros((k, d), dtype=np.float64)
    for j in range(k):
        if counts[j] > 0:
            centers[j] = sums[j] / counts[j]
    return centers, counts


def knn_order_numpy(query: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Indices of `points` sorted by squared distance to `query`; stable,
    so equal distances keep ascending row order."""
    d2 = np.sum((points - query) ** 2, axis=1)
    return np.argsort(d2, kind="stable")


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if JIT_ENABLED:
    from numba import njit

    @njit(cache=True)
    def _sq_dist_jit(a, b):
        acc = 0.0
        for i in range(a.shape[0]):
            diff = a[i] - b[i]
            acc += diff * diff
        return acc

    @njit(cache=True)
    def _pairwise_sq_dists_jit(points, centers):
        n = points.shape[0]
        k = centers.shape[0]
        out = np.empty((n, k), dtype=np.float64)
        for i in range(n):
            for j in range(k):
                out[i, j] = _sq_dist_jit(points[i], centers[j])
        return out

    @njit(cache=True)
    def _assign_labels_jit(points, centers):
        n = points.shape[0]
        k = centers.shape[0]
        labels = np.empty(n, dtype=np.int64)
        dists = np.empty(n, dtype=np.float64)
        for i in range(n):
            best = 0
            best_d = _sq_dist_jit(points[i], centers[0])
            for j in range(1, k):
                d = _sq_dist_jit(points[i], centers[j])
                if d < best_d:  # strict: ties keep the lowest index
                    best_d = d
                    best = j
            labels[i] = best
            dists[i] = best_d
        return labels, dists

    @njit(cache=True)
    def _update_centroids_jit(points, labels, k):
        n, d = points.shape
        sums = np.zeros((k, d), dtype=np.float64)
        counts = np.zeros(k, dtype=np.int64)
        for i in range(n):
            lab = labels[i]
            for c in range(d):
                sums[lab, c] += points[i, c]
            counts[lab] += 1
        centers = np.zeros((k, d), dtype=np.float64)
        for j in range(k):
            if counts[j] > 0:
                for c in range(d):
                    centers[j, c] = sums[j, c] / counts[j]
        return centers, counts

    def sq_dist_jit(a, b):
        return float(_sq_dist_jit(a, b))

    pairwise_sq_dists_jit = _pairwise_sq_dists_jit

    def assign_labels_jit(points, centers):
        return _assign_labels_jit(points, centers)

    def update_centroids_jit(points, labels, k):
        return _update_centroids_jit(points, labels, k)

    sq_dist = sq_dist_jit
    pairwise_sq_dists = pairwise_sq_dists_jit
    assign_labels = assign_labels_jit
    update_centroids = update_centroids_jit
else:
    sq_dist_jit = None
    pairwise_sq_dists_jit = None
    assign_labels_jit = None
    update_centroids_jit = None

    sq_dist = sq_dist_numpy
    pairwise_sq_dists = pairwise_sq_dists_numpy
    assign_labels = assign_labels_numpy
    update_centroids = update_centroids_numpy

# KNN ordering is argsort-dominated; numpy's stable sort wins at any size we
# care about, so there is no jit variant.
knn_order = knn_order_numpy
