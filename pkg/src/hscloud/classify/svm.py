"""RBF-kernel SVM inference over hyperspectral cubes.

A model is a set of one-vs-rest binary classifiers, each holding its support
vectors, dual coefficients, bias, kernel gamma, and sigmoid calibration
(A, B).  Per pixel, every classifier's decision value is calibrated to
p = 1 / (1 + exp(A*d + B)) and the calibrated scores are renormalized to a
probability vector.  Prediction is stateless across pixels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import FeatureMismatchError
from ..hypercube import LAYOUT_BSQ, HyperCube
from .maps import ClassSpec, ProbabilityMap

MODEL_FORMAT_VERSION = 1

_CHUNK = 4096


@dataclass
class BinaryClassifier:
    """One one-vs-rest sub-classifier of an SvmModel."""

    support_vectors: np.ndarray  # (n_sv, features) float64
    dual_coef: np.ndarray        # (n_sv,) float64
    bias: float
    gamma: float
    platt_a: float
    platt_b: float

    def __post_init__(self):
        self.support_vectors = np.asarray(self.support_vectors, dtype=np.float64)
        self.dual_coef = np.asarray(self.dual_coef, dtype=np.float64)
        if self.support_vectors.ndim != 2 or self.support_vectors.shape[0] < 1:
            raise ValueError("a sub-classifier needs at least one support vector")
        if self.dual_coef.shape != (self.support_vectors.shape[0],):
            raise ValueError("dual coefficients must match the support vectors")
        if not self.gamma > 0:
            raise ValueError("gamma must be > 0")

    def decision(self, X: np.ndarray) -> np.ndarray:
        """Kernel-sum decision values for samples X (n, features)."""
        sq = (np.sum(X * X, axis=1)[:, None]
              + np.sum(self.support_vectors * self.support_vectors, axis=1)[None, :]
              - 2.0 * X @ self.support_vectors.T)
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-self.gamma * sq) @ self.dual_coef + self.bias

    def calibrated(self, X: np.ndarray) -> np.ndarray:
        """Platt-calibrated probability of the positive class."""
        f = self.platt_a * self.decision(X) + self.platt_b
        return 1.0 / (1.0 + np.exp(np.clip(f, -500.0, 500.0)))


@dataclass
class SvmModel:
    classes: list[ClassSpec]
    classifiers: list[BinaryClassifier]
    feature_count: int = 25

    def __post_init__(self):
        if len(self.classes) != len(self.classifiers):
            raise ValueError("one sub-classifier per class (one-vs-rest)")
        for clf in self.classifiers:
            if clf.support_vectors.shape[1] != self.feature_count:
                raise ValueError("support vector width must equal feature_count")

    @property
    def class_count(self) -> int:
        return len(self.classes)


def predict_proba_samples(X: np.ndarray, model: SvmModel) -> np.ndarray:
    """Probability rows for a (n, features) sample matrix."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.feature_count:
        raise FeatureMismatchError(
            f"samples have {X.shape[-1]} features, model expects {model.feature_count}"
        )
    n = X.shape[0]
    out = np.empty((n, model.class_count), dtype=np.float64)
    for start in range(0, n, _CHUNK):
        chunk = X[start:start + _CHUNK]
        raw = np.stack([clf.calibrated(chunk) for clf in model.classifiers], axis=1)
        sums = raw.sum(axis=1, keepdims=True)
        degenerate = sums[:, 0] <= 0
        if np.any(degenerate):
            raw[degenerate] = 1.0
            sums = raw.sum(axis=1, keepdims=True)
        out[start:start + _CHUNK] = raw / sums
    return out


def svm_predict(cube: HyperCube, model: SvmModel) -> ProbabilityMap:
    """Classify every pixel of a band-sequential cube into class probabilities."""
    if cube.layout != LAYOUT_BSQ:
        raise FeatureMismatchError("svm_predict expects a band-sequential cube")
    if cube.bands_active != model.feature_count:
        raise FeatureMismatchError(
            f"cube has {cube.bands_active} bands, model expects {model.feature_count}"
        )
    X = cube.values.reshape(cube.bands_active, -1).T.astype(np.float64)
    probs = predict_proba_samples(X, model)
    return ProbabilityMap(probs.reshape(cube.height, cube.width, model.class_count))


def model_to_dict(model: SvmModel) -> dict:
    return {
        "version": MODEL_FORMAT_VERSION,
        "feature_count": model.feature_count,
        "classes": [
            {"name": c.name, "color": list(c.color)} for c in model.classes
        ],
        "classifiers": [
            {
                "gamma": clf.gamma,
                "bias": clf.bias,
                "platt_a": clf.platt_a,
                "platt_b": clf.platt_b,
                "support_vectors": clf.support_vectors.tolist(),
                "dual_coef": clf.dual_coef.tolist(),
            }
            for clf in model.classifiers
        ],
    }


def model_from_dict(doc: dict) -> SvmModel:
    if "version" not in doc:
        raise ValueError("model document lacks the mandatory version field")
    if doc["version"] != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model version {doc['version']}")
    classes = [ClassSpec(c["name"], tuple(c["color"])) for c in doc["classes"]]
    classifiers = [
        BinaryClassifier(
            support_vectors=np.array(c["support_vectors"], dtype=np.float64),
            dual_coef=np.array(c["dual_coef"], dtype=np.float64),
            bias=float(c["bias"]),
            gamma=float(c["gamma"]),
            platt_a=float(c["platt_a"]),
            platt_b=float(c["platt_b"]),
        )
        for c in doc["classifiers"]
    ]
    return SvmModel(classes, classifiers, feature_count=int(doc["feature_count"]))


def save_model(model: SvmModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1))


def load_model(path: str | Path) -> SvmModel:
    return model_from_dict(json.loads(Path(path).read_text()))
