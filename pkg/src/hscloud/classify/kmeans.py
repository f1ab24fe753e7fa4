"""Spectral K-Means over band-sequential cubes (Lloyd iterations, L2 distance).

The exact procedure matters because a naive reference implementation must be
able to reproduce it step for step:

1. Initialize the K centroids to K distinct pixels drawn with
   ``np.random.default_rng(seed).choice(n_pixels, K, replace=False)``.
2. Assign every pixel to the nearest centroid (ties -> lowest cluster id).
3. Re-seed every empty cluster, in ascending cluster id: the point farthest
   from its currently assigned centroid becomes the empty cluster's centroid
   and is reassigned to it (ties -> lowest point index).
4. Update each centroid to the mean of its members; record inertia.
5. Stop when the assignment is unchanged, centroid movement falls below
   ``tol``, or ``max_iter`` is reached.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import ClusterCountError, LayoutError
from ..hypercube import LAYOUT_BSQ, HyperCube
from .maps import ClusterMap

MAX_CLUSTERS = 64


def _pairwise_sq(X: np.ndarray, C: np.ndarray,
                 x_sq: np.ndarray | None = None) -> np.ndarray:
    if x_sq is None:
        x_sq = np.sum(X * X, axis=1)
    sq = (x_sq[:, None] + np.sum(C * C, axis=1)[None, :] - 2.0 * X @ C.T)
    np.maximum(sq, 0.0, out=sq)
    return sq


def _centroid_means(X: np.ndarray, assign: np.ndarray, k: int,
                    counts: np.ndarray) -> np.ndarray:
    sums = np.empty((k, X.shape[1]))
    for b in range(X.shape[1]):
        sums[:, b] = np.bincount(assign, weights=X[:, b], minlength=k)
    safe = np.maximum(counts, 1)
    return sums / safe[:, None]


def kmeans_points(X: np.ndarray, k: int, seed: int = 0, max_iter: int = 100,
                  tol: float = 1e-6) -> tuple[np.ndarray, np.ndarray, float, list[float]]:
    """Lloyd K-Means over a (n, features) matrix; see the module docstring.

    Returns (assignment, centroids, inertia, inertia history).  The recorded
    per-iteration inertia is J(assignment_t, centroids_t) after the centroid
    update, the canonically non-increasing Lloyd sequence.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if k > n:
        raise ClusterCountError(f"K = {k} exceeds the {n} available pixels")
    if not 1 <= k <= MAX_CLUSTERS:
        raise ClusterCountError(f"K must be in [1, {MAX_CLUSTERS}]")
    rng = np.random.default_rng(seed)
    centroids = X[rng.choice(n, size=k, replace=False)].copy()
    assign = np.full(n, -1, dtype=np.int64)
    x_sq = np.sum(X * X, axis=1)
    rows = np.arange(n)
    history: list[float] = []
    for _ in range(max_iter):
        sq = _pairwise_sq(X, centroids, x_sq)
        if history:
            # previous iteration's post-update inertia, computed lazily here
            history[-1] = float(np.sum(sq[rows, assign]))
        new_assign = np.argmin(sq, axis=1)
        member_sq = sq[rows, new_assign]
        counts = np.bincount(new_assign, minlength=k)
        for empty in np.nonzero(counts == 0)[0]:
            far = int(np.argmax(member_sq))
            counts[new_assign[far]] -= 1
            new_assign[far] = empty
            counts[empty] = 1
            centroids[empty] = X[far]
            member_sq[far] = 0.0
        old_centroids = centroids.copy()
        means = _centroid_means(X, new_assign, k, counts)
        nonempty = counts > 0
        centroids[nonempty] = means[nonempty]
        max_move = float(np.max(np.linalg.norm(centroids - old_centroids, axis=1)))
        history.append(np.nan)  # patched on the next pass or at exit
        if np.array_equal(new_assign, assign):
            assign = new_assign
            break
        assign = new_assign
        if max_move < tol:
            break
    if not history:
        raise ClusterCountError("max_iter must be >= 1")
    final = float(np.sum(_pairwise_sq(X, centroids, x_sq)[rows, assign]))
    if np.isnan(history[-1]):
        history[-1] = final
    return assign, centroids, final, history


def kmeans_cluster(cube: HyperCube, k: int, seed: int = 0, max_iter: int = 100,
                   tol: float = 1e-6) -> ClusterMap:
    """Cluster a band-sequential cube's pixels by spectral similarity."""
    if cube.layout != LAYOUT_BSQ:
        raise LayoutError("kmeans_cluster expects a band-sequential cube")
    X = cube.values.reshape(cube.bands_active, -1).T.astype(np.float64)
    assign, centroids, inertia, history = kmeans_points(X, k, seed, max_iter, tol)
    return ClusterMap(
        assignment=assign.reshape(cube.height, cube.width).astype(np.int32),
        centroids=centroids,
        inertia=inertia,
        inertia_history=history,
    )


class SpectralKMeans(BaseEstimator):
    """Estimator facade over :func:`kmeans_cluster`."""

    def __init__(self, n_clusters=16, seed=0, max_iter=100, tol=1e-6):
        self.n_clusters = n_clusters
        self.seed = seed
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X: HyperCube, y=None):
        self.cluster_map_ = kmeans_cluster(X, self.n_clusters, self.seed,
                                           self.max_iter, self.tol)
        return self

    def fit_predict(self, X: HyperCube, y=None) -> ClusterMap:
        return self.fit(X).cluster_map_
