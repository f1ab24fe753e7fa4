"""Spectral K-Means vs a naive Lloyd reference implementing the same procedure."""

import numpy as np
import pytest

from hscloud.classify import kmeans_cluster, kmeans_points, SpectralKMeans
from hscloud.errors import ClusterCountError, LayoutError
from hscloud.hypercube import HyperCube


def naive_lloyd(X, k, seed, max_iter=100, tol=1e-6):
    """Plain-loop Lloyd with the documented init/tie/reseed rules."""
    X = np.asarray(X, dtype=np.float64)
    n = len(X)
    rng = np.random.default_rng(seed)
    centroids = X[rng.choice(n, size=k, replace=False)].copy()
    assign = np.full(n, -1)
    for _ in range(max_iter):
        new_assign = np.empty(n, dtype=np.int64)
        member_sq = np.empty(n)
        for i in range(n):
            best, best_d = 0, None
            for c in range(k):
                d = 0.0
                for f in range(X.shape[1]):
                    d += (X[i, f] - centroids[c, f]) ** 2
                if best_d is None or d < best_d:
                    best, best_d = c, d
            new_assign[i] = best
            member_sq[i] = best_d
        counts = np.bincount(new_assign, minlength=k)
        for empty in np.where(counts == 0)[0]:
            far = int(np.argmax(member_sq))
            counts[new_assign[far]] -= 1
            new_assign[far] = empty
            counts[empty] = 1
            centroids[empty] = X[far]
            member_sq[far] = 0.0
        old = centroids.copy()
        for c in range(k):
            members = new_assign == c
            if members.any():
                centroids[c] = X[members].mean(axis=0)
        move = float(np.max(np.linalg.norm(centroids - old, axis=1)))
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        if move < tol:
            break
    return assign, centroids


def random_cube(rng, h=8, w=8, bands=25):
    return HyperCube(rng.random((bands, h, w)), "bsq", bands_active=bands)


class TestKMeans:
    def test_k1_global_mean(self):
        rng = np.random.default_rng(0)
        cube = random_cube(rng)
        cm = kmeans_cluster(cube, 1, seed=0)
        assert np.all(cm.assignment == 0)
        X = cube.values.reshape(25, -1).T
        assert np.allclose(cm.centroids[0], X.mean(axis=0))
        assert np.isclose(cm.inertia, np.sum((X - X.mean(axis=0)) ** 2))

    def test_two_separated_blobs(self):
        rng = np.random.default_rng(1)
        X = np.vstack([rng.normal(0, 0.1, (32, 25)),
                       rng.normal(5, 0.1, (32, 25))])
        assign, _, _, _ = kmeans_points(X, 2, seed=3)
        blob = np.array([0] * 32 + [1] * 32)
        # labels may be swapped; membership must match exactly
        same = np.array_equal(assign, blob)
        flipped = np.array_equal(assign, 1 - blob)
        assert same or flipped

    def test_inertia_non_increasing(self):
        rng = np.random.default_rng(2)
        for seed in range(5):
            cube = random_cube(rng)
            cm = kmeans_cluster(cube, 6, seed=seed)
            h = np.array(cm.inertia_history)
            assert np.all(np.diff(h) <= 1e-9)

    def test_assignment_is_fixed_point(self):
        rng = np.random.default_rng(3)
        cube = random_cube(rng)
        cm = kmeans_cluster(cube, 4, seed=9)
        X = cube.values.reshape(25, -1).T
        d = ((X[:, None, :] - cm.centroids[None]) ** 2).sum(axis=2)
        assert np.array_equal(np.argmin(d, axis=1), cm.assignment.ravel())
        for c in range(4):
            members = cm.assignment.ravel() == c
            if members.any():
                assert np.allclose(cm.centroids[c], X[members].mean(axis=0),
                                   atol=1e-5)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_matches_naive_oracle(self, seed):
        rng = np.random.default_rng(100 + seed)
        X = rng.random((60, 5))
        assign, centroids, _, _ = kmeans_points(X, 5, seed=seed)
        oracle_assign, oracle_centroids = naive_lloyd(X, 5, seed=seed)
        assert np.array_equal(assign, oracle_assign)
        assert np.allclose(centroids, oracle_centroids, atol=1e-12)

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(4)
        cube = random_cube(rng)
        a = kmeans_cluster(cube, 8, seed=5)
        b = kmeans_cluster(cube, 8, seed=5)
        assert np.array_equal(a.assignment, b.assignment)
        assert np.array_equal(a.centroids, b.centroids)

    def test_k_exceeding_pixels(self):
        rng = np.random.default_rng(5)
        cube = HyperCube(rng.random((25, 2, 2)), "bsq")
        with pytest.raises(ClusterCountError):
            kmeans_cluster(cube, 5, seed=0)

    def test_k_capped_at_64(self):
        rng = np.random.default_rng(6)
        with pytest.raises(ClusterCountError):
            kmeans_points(rng.random((200, 3)), 65)

    def test_layout_guard(self):
        cube = HyperCube(np.zeros((2, 2, 32), dtype=np.float32), "bip")
        with pytest.raises(LayoutError):
            kmeans_cluster(cube, 2)

    def test_estimator_facade(self):
        rng = np.random.default_rng(7)
        cube = random_cube(rng)
        est = SpectralKMeans(n_clusters=3, seed=1)
        cm = est.fit_predict(cube)
        assert cm.k == 3
        assert est.get_params()["n_clusters"] == 3
