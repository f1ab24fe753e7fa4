"""Majority voting, colorization, argmax labeling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hscloud.classify import (
    ClassSpec,
    ClusterMap,
    ProbabilityMap,
    argmax_labels,
    colorize,
    majority_vote,
)
from hscloud.errors import GridMismatchError

PALETTE = [
    ClassSpec("red", (255, 0, 0, 255)),
    ClassSpec("green", (0, 255, 0, 255)),
    ClassSpec("blue", (0, 0, 255, 255)),
    ClassSpec("pink", (255, 105, 180, 255)),
]


def random_probability_map(rng, h=6, w=8, c=4):
    raw = rng.random((h, w, c)) + 1e-6
    return ProbabilityMap(raw / raw.sum(axis=2, keepdims=True))


def cluster_map_of(assign, k, centroids_dim=25):
    assign = np.asarray(assign, dtype=np.int32)
    return ClusterMap(assignment=assign,
                      centroids=np.zeros((k, centroids_dim)), inertia=0.0)


def naive_vote(probs, assign, k):
    out = np.empty_like(probs)
    for c in range(k):
        members = assign == c
        if members.any():
            out[members] = probs[members].mean(axis=0)
    return out


class TestMajorityVote:
    def test_single_cluster_global_mean(self):
        probs = np.zeros((2, 2, 2))
        probs[0, 0] = probs[1, 1] = [1.0, 0.0]
        probs[0, 1] = probs[1, 0] = [0.0, 1.0]
        pm = ProbabilityMap(probs)
        cm = cluster_map_of(np.zeros((2, 2)), 1)
        out = majority_vote(pm, cm)
        assert np.allclose(out.probs, 0.5)

    def test_singleton_clusters_identity(self):
        rng = np.random.default_rng(0)
        pm = random_probability_map(rng, h=2, w=3)
        cm = cluster_map_of(np.arange(6).reshape(2, 3), 6)
        out = majority_vote(pm, cm)
        assert np.allclose(out.probs, pm.probs)

    def test_matches_naive_mean_oracle(self):
        rng = np.random.default_rng(1)
        pm = random_probability_map(rng, h=10, w=12)
        assign = rng.integers(0, 7, size=(10, 12))
        cm = cluster_map_of(assign, 7)
        out = majority_vote(pm, cm)
        assert np.allclose(out.probs, naive_vote(pm.probs, assign, 7), atol=1e-6)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=20, deadline=None)
    def test_idempotent_and_mass_preserving(self, seed):
        rng = np.random.default_rng(seed)
        pm = random_probability_map(rng, h=5, w=5)
        assign = rng.integers(0, 4, size=(5, 5))
        cm = cluster_map_of(assign, 4)
        once = majority_vote(pm, cm)
        twice = majority_vote(once, cm)
        assert np.allclose(once.probs, twice.probs, atol=1e-12)
        for c in range(4):
            members = assign == c
            if members.any():
                assert np.allclose(pm.probs[members].sum(axis=0),
                                   once.probs[members].sum(axis=0), atol=1e-9)
        assert np.allclose(once.probs.sum(axis=2), 1.0, atol=1e-6)

    def test_grid_mismatch(self):
        rng = np.random.default_rng(2)
        pm = random_probability_map(rng, h=2, w=2)
        cm = cluster_map_of(np.zeros((3, 3)), 1)
        with pytest.raises(GridMismatchError):
            majority_vote(pm, cm)


class TestColorize:
    def test_pure_tumor_red(self):
        pm = ProbabilityMap(np.array([[[1.0, 0.0, 0.0, 0.0]]]))
        img = colorize(pm, PALETTE)
        assert tuple(img[0, 0]) == (255, 0, 0)

    def test_uniform_blend_hand_computed(self):
        pm = ProbabilityMap(np.full((1, 1, 4), 0.25))
        img = colorize(pm, PALETTE)
        # (255+255)/4, (255+105)/4, (255+180)/4 -> rounded
        assert tuple(img[0, 0]) == (128, 90, 109)

    def test_one_hot_equals_lookup(self):
        rng = np.random.default_rng(3)
        labels = rng.integers(0, 4, size=(5, 7))
        probs = np.zeros((5, 7, 4))
        for i in range(5):
            for j in range(7):
                probs[i, j, labels[i, j]] = 1.0
        img = colorize(ProbabilityMap(probs), PALETTE)
        lut = np.array([c.color[:3] for c in PALETTE], dtype=np.uint8)
        assert np.array_equal(img, lut[labels])

    def test_wrong_palette_size(self):
        pm = ProbabilityMap(np.full((1, 1, 4), 0.25))
        with pytest.raises(ValueError):
            colorize(pm, PALETTE[:3])


class TestArgmaxLabels:
    def test_strict_argmax(self):
        pm = ProbabilityMap(np.array([[[0.2, 0.5, 0.3]]]))
        assert argmax_labels(pm).labels[0, 0] == 1

    def test_tie_breaks_lowest(self):
        pm = ProbabilityMap(np.array([[[0.5, 0.5]]]))
        assert argmax_labels(pm).labels[0, 0] == 0

    def test_consistent_with_colorize_lookup(self):
        rng = np.random.default_rng(4)
        labels = rng.integers(0, 4, size=(4, 4))
        probs = np.zeros((4, 4, 4))
        for i in range(4):
            for j in range(4):
                probs[i, j, labels[i, j]] = 1.0
        pm = ProbabilityMap(probs)
        got = argmax_labels(pm).labels
        img = colorize(pm, PALETTE)
        lut = {tuple(c.color[:3]): i for i, c in enumerate(PALETTE)}
        inverted = np.array([[lut[tuple(img[i, j])] for j in range(4)]
                             for i in range(4)])
        assert np.array_equal(got, labels)
        assert np.array_equal(inverted, labels)
