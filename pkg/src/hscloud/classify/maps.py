"""Classification domain types: probability, cluster, and label maps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNLABELED = 255  # ground-truth sentinel for pixels with no class


@dataclass(frozen=True)
class ClassSpec:
    """A class name and its opaque display color."""

    name: str
    color: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.color) != 4 or self.color[3] != 255:
            raise ValueError("class colors must be opaque RGBA")


# default palette: tumor red, healthy green, blood blue, dura-mater pink
DEFAULT_CLASSES = (
    ClassSpec("tumor", (255, 0, 0, 255)),
    ClassSpec("healthy", (0, 255, 0, 255)),
    ClassSpec("blood", (0, 0, 255, 255)),
    ClassSpec("dura_mater", (255, 105, 180, 255)),
)


@dataclass
class ProbabilityMap:
    """Per-pixel class probability vectors over the HS grid; rows sum to 1."""

    probs: np.ndarray  # (H, W, C) float64

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.ndim != 3:
            raise ValueError("probability map must be (H, W, C)")
        if np.any(self.probs < -1e-9):
            raise ValueError("probabilities must be non-negative")
        sums = self.probs.sum(axis=2)
        if not np.allclose(sums, 1.0, atol=1e-6):
            raise ValueError("probability rows must sum to 1 within 1e-6")

    @property
    def width(self) -> int:
        return self.probs.shape[1]

    @property
    def height(self) -> int:
        return self.probs.shape[0]

    @property
    def class_count(self) -> int:
        return self.probs.shape[2]

    def flat(self) -> np.ndarray:
        return self.probs.reshape(-1, self.class_count)


@dataclass
class ClusterMap:
    """Spectral cluster assignment plus the converged centroids and inertia."""

    assignment: np.ndarray  # (H, W) int32
    centroids: np.ndarray   # (K, bands) float64
    inertia: float
    inertia_history: list[float] | None = None

    def __post_init__(self):
        self.assignment = np.asarray(self.assignment, dtype=np.int32)
        self.centroids = np.asarray(self.centroids, dtype=np.float64)
        if self.assignment.ndim != 2:
            raise ValueError("assignment must be (H, W)")
        k = self.centroids.shape[0]
        if k < 1 or k > 64:
            raise ValueError("cluster count must be in [1, 64]")
        if self.assignment.min() < 0 or self.assignment.max() >= k:
            raise ValueError("every pixel must be assigned a cluster in [0, K)")
        if self.inertia < 0:
            raise ValueError("inertia must be >= 0")

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


@dataclass
class LabelMap:
    """Per-pixel class indices; UNLABELED marks ground-truth holes."""

    labels: np.ndarray  # (H, W) uint8

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.uint8)
        if self.labels.ndim != 2:
            raise ValueError("labels must be (H, W)")

    def mask(self) -> np.ndarray:
        return self.labels != UNLABELED
