"""Ranking metrics: Mann-Whitney AUC with tie handling, macro-averaged."""

from __future__ import annotations

import numpy as np

from ..errors import SingleClassError


def auc_score(scores, labels) -> float:
    """Probability that a random positive outranks a random negative (ties count 1/2).

    Computed by the rank-sum formulation with average ranks for ties, which is
    exactly the exhaustive pair count.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels).astype(bool)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("scores and labels must be matching 1-D arrays")
    n_pos = int(np.count_nonzero(y))
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("AUC needs both positive and negative samples")
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(s.size, dtype=np.float64)
    sorted_s = s[order]
    i = 0
    while i < s.size:
        j = i
        while j + 1 < s.size and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank
        i = j + 1
    rank_sum_pos = float(np.sum(ranks[y]))
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def macro_auc(probs: np.ndarray, labels: np.ndarray) -> float:
    """Mean one-vs-rest AUC over every class present in the labels."""
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels).ravel()
    if probs.ndim != 2 or probs.shape[0] != labels.size:
        raise ValueError("probs must be (n, classes) matching labels")
    per_class = []
    for c in np.unique(labels):
        per_class.append(auc_score(probs[:, int(c)], labels == c))
    if not per_class:
        raise SingleClassError("no labeled samples")
    return float(np.mean(per_class))
