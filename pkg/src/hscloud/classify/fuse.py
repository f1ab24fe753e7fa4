"""Classifier fusion and display: majority voting, colorization, labeling."""

from __future__ import annotations

import numpy as np

from ..errors import GridMismatchError
from .maps import ClassSpec, ClusterMap, LabelMap, ProbabilityMap


def majority_vote(probs: ProbabilityMap, clusters: ClusterMap) -> ProbabilityMap:
    """Replace each pixel's probability vector with its cluster's mean vector.

    Smooths the per-pixel classification while preserving each cluster's
    total probability mass per class; output rows still sum to 1.
    """
    if probs.probs.shape[:2] != clusters.assignment.shape:
        raise GridMismatchError(
            f"probability grid {probs.probs.shape[:2]} vs cluster grid "
            f"{clusters.assignment.shape}"
        )
    flat = probs.flat()
    assign = clusters.assignment.ravel().astype(np.int64)
    k = clusters.k
    sums = np.zeros((k, probs.class_count), dtype=np.float64)
    np.add.at(sums, assign, flat)
    counts = np.bincount(assign, minlength=k).astype(np.float64)
    counts[counts == 0] = 1.0
    means = sums / counts[:, None]
    out = means[assign].reshape(probs.probs.shape)
    return ProbabilityMap(out)


def colorize(probs: ProbabilityMap, classes: list[ClassSpec]) -> np.ndarray:
    """Blend class colors by probability: pixel = sum_c p_c * color_c (H, W, 3 uint8)."""
    if len(classes) != probs.class_count:
        raise ValueError("need one color per class")
    colors = np.array([c.color[:3] for c in classes], dtype=np.float64)
    blended = probs.probs @ colors
    return np.clip(np.floor(blended + 0.5), 0, 255).astype(np.uint8)


def argmax_labels(probs: ProbabilityMap) -> LabelMap:
    """Per-pixel most probable class; ties broken by the lowest class index."""
    return LabelMap(np.argmax(probs.probs, axis=2).astype(np.uint8))
