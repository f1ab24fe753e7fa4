"""Toy SVM trainer: SMO on the dual plus Platt sigmoid calibration.

This exists to make the repository self-testable on synthetic data; it is a
plain sequential-minimal-optimization solver with a deterministic sweep order
and a deterministic second-index heuristic (max |E_i - E_j|), so the same
data always yields the bit-identical model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import DegenerateDataError
from .maps import ClassSpec, DEFAULT_CLASSES
from .svm import BinaryClassifier, SvmModel, predict_proba_samples


@dataclass
class SvmTrainConfig:
    C: float = 10.0
    gamma: float | str = "scale"
    tol: float = 1e-3
    max_passes: int = 10
    max_sweeps: int = 200
    seed: int = 0


def _rbf_kernel_matrix(X: np.ndarray, gamma: float) -> np.ndarray:
    sq = (np.sum(X * X, axis=1)[:, None] + np.sum(X * X, axis=1)[None, :]
          - 2.0 * X @ X.T)
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def _resolve_gamma(X: np.ndarray, gamma: float | str) -> float:
    if gamma == "scale":
        var = float(X.var())
        return 1.0 / (X.shape[1] * var) if var > 0 else 1.0 / X.shape[1]
    g = float(gamma)
    if not g > 0:
        raise ValueError("gamma must be > 0")
    return g


def _smo(K: np.ndarray, y: np.ndarray, C: float, tol: float,
         max_passes: int, max_sweeps: int) -> tuple[np.ndarray, float]:
    """Solve the dual problem; returns (alpha, bias) for f(x) = sum a*y*K + b."""
    n = y.shape[0]
    alpha = np.zeros(n)
    b = 0.0
    F = np.zeros(n)  # F[i] = sum_j alpha_j y_j K_ij, maintained incrementally
    passes = 0
    sweeps = 0
    while passes < max_passes and sweeps < max_sweeps:
        changed = 0
        for i in range(n):
            Ei = F[i] + b - y[i]
            if not ((y[i] * Ei < -tol and alpha[i] < C)
                    or (y[i] * Ei > tol and alpha[i] > 0)):
                continue
            E = F + b - y
            gaps = np.abs(Ei - E)
            gaps[i] = -1.0
            j = int(np.argmax(gaps))
            Ej = E[j]
            if y[i] != y[j]:
                L = max(0.0, alpha[j] - alpha[i])
                H = min(C, C + alpha[j] - alpha[i])
            else:
                L = max(0.0, alpha[i] + alpha[j] - C)
                H = min(C, alpha[i] + alpha[j])
            if L >= H:
                continue
            eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
            if eta >= 0:
                continue
            aj_new = alpha[j] - y[j] * (Ei - Ej) / eta
            aj_new = min(H, max(L, aj_new))
            if abs(aj_new - alpha[j]) < 1e-10:
                continue
            ai_new = alpha[i] + y[i] * y[j] * (alpha[j] - aj_new)
            dai = ai_new - alpha[i]
            daj = aj_new - alpha[j]
            b1 = b - Ei - y[i] * dai * K[i, i] - y[j] * daj * K[i, j]
            b2 = b - Ej - y[i] * dai * K[i, j] - y[j] * daj * K[j, j]
            if 0 < ai_new < C:
                b = b1
            elif 0 < aj_new < C:
                b = b2
            else:
                b = 0.5 * (b1 + b2)
            alpha[i] = ai_new
            alpha[j] = aj_new
            F += y[i] * dai * K[:, i] + y[j] * daj * K[:, j]
            changed += 1
        passes = passes + 1 if changed == 0 else 0
        sweeps += 1
    return alpha, b


def _fit_platt(decisions: np.ndarray, positives: np.ndarray,
               max_iter: int = 100) -> tuple[float, float]:
    """Fit sigmoid P(y=1|f) = 1/(1+exp(A f + B)) by regularized NLL (Newton)."""
    prior1 = float(np.count_nonzero(positives))
    prior0 = float(positives.size - prior1)
    hi = (prior1 + 1.0) / (prior1 + 2.0)
    lo = 1.0 / (prior0 + 2.0)
    t = np.where(positives, hi, lo)
    A, B = 0.0, np.log((prior0 + 1.0) / (prior1 + 1.0))
    f = decisions

    def objective(a, b):
        fApB = a * f + b
        pos = fApB >= 0
        return float(np.sum(np.where(
            pos,
            t * fApB + np.log1p(np.exp(-fApB)),
            (t - 1.0) * fApB + np.log1p(np.exp(fApB)),
        )))

    sigma = 1e-12
    fval = objective(A, B)
    for _ in range(max_iter):
        fApB = A * f + B
        pos = fApB >= 0
        p = np.where(pos, np.exp(-fApB) / (1.0 + np.exp(-fApB)),
                     1.0 / (1.0 + np.exp(fApB)))
        q = 1.0 - p
        d1 = t - p
        d2 = p * q
        g1 = float(np.sum(f * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        h11 = float(np.sum(f * f * d2)) + sigma
        h22 = float(np.sum(d2)) + sigma
        h21 = float(np.sum(f * d2))
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= 1e-10:
            newA, newB = A + step * dA, B + step * dB
            newf = objective(newA, newB)
            if newf < fval + 1e-4 * step * gd:
                A, B, fval = newA, newB, newf
                break
            step /= 2.0
        else:
            break
    return A, B


def _train_once(X: np.ndarray, y: np.ndarray, class_ids: np.ndarray,
                class_specs: list[ClassSpec], gamma: float, C: float,
                config: SvmTrainConfig) -> SvmModel:
    K = _rbf_kernel_matrix(X, gamma)
    classifiers = []
    for c in class_ids:
        yb = np.where(y == c, 1.0, -1.0)
        alpha, bias = _smo(K, yb, C, config.tol,
                           config.max_passes, config.max_sweeps)
        sv = alpha > 1e-8
        if not np.any(sv):
            sv = np.zeros_like(alpha, dtype=bool)
            sv[int(np.argmax(alpha))] = True
        dual = (alpha * yb)[sv]
        decisions = K[:, sv] @ dual + bias
        a, b = _fit_platt(decisions, yb > 0)
        classifiers.append(BinaryClassifier(
            support_vectors=X[sv], dual_coef=dual, bias=bias,
            gamma=gamma, platt_a=a, platt_b=b,
        ))
    return SvmModel(list(class_specs), classifiers, feature_count=X.shape[1])


def _nearest_centroid_accuracy(X: np.ndarray, y: np.ndarray,
                               class_ids: np.ndarray) -> float:
    centroids = np.stack([X[y == c].mean(axis=0) for c in class_ids])
    d = ((X[:, None, :] - centroids[None]) ** 2).sum(axis=2)
    return float(np.mean(class_ids[np.argmin(d, axis=1)] == y))


def svm_train_toy(samples: np.ndarray, labels: np.ndarray,
                  config: SvmTrainConfig | None = None,
                  class_specs: list[ClassSpec] | None = None) -> SvmModel:
    """Train a one-vs-rest RBF model good enough to exercise the pipeline.

    Deterministic given (data, config); requires >= 2 classes with >= 2
    samples each.  The returned model is guaranteed to fit its own training
    set at least as well as a nearest-centroid baseline: if the configured
    hyperparameters fall short (heavily overlapping data), gamma and C are
    escalated a few fixed steps and the best attempt is kept.
    """
    config = config or SvmTrainConfig()
    X = np.asarray(samples, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("samples must be (n, features) with one label each")
    class_ids = np.unique(y)
    if class_ids.size < 2:
        raise DegenerateDataError("training needs at least two classes")
    counts = [int(np.count_nonzero(y == c)) for c in class_ids]
    if min(counts) < 2:
        raise DegenerateDataError("every class needs at least two samples")
    if class_specs is None:
        palette = list(DEFAULT_CLASSES)
        while len(palette) < class_ids.size:
            i = len(palette)
            palette.append(ClassSpec(f"class_{i}", (97 * (i + 1) % 256,
                                                    53 * (i + 3) % 256,
                                                    151 * (i + 2) % 256, 255)))
        class_specs = [palette[i] for i in range(class_ids.size)]
    if len(class_specs) != class_ids.size:
        raise ValueError("need one ClassSpec per class")

    baseline = _nearest_centroid_accuracy(X, y, class_ids)
    gamma = _resolve_gamma(X, config.gamma)
    C = config.C
    best: tuple[float, SvmModel] | None = None
    for _ in range(4):
        model = _train_once(X, y, class_ids, class_specs, gamma, C, config)
        probs = predict_proba_samples(X, model)
        accuracy = float(np.mean(class_ids[np.argmax(probs, axis=1)] == y))
        if best is None or accuracy > best[0]:
            best = (accuracy, model)
        if accuracy >= baseline:
            break
        gamma *= 8.0
        C *= 10.0
    return best[1]


class RbfSvm(BaseEstimator):
    """sklearn-style facade over the toy trainer and the kernel predictor."""

    def __init__(self, C=10.0, gamma="scale", tol=1e-3, max_passes=10, seed=0,
                 class_specs=None):
        self.C = C
        self.gamma = gamma
        self.tol = tol
        self.max_passes = max_passes
        self.seed = seed
        self.class_specs = class_specs

    def fit(self, X, y):
        config = SvmTrainConfig(C=self.C, gamma=self.gamma, tol=self.tol,
                                max_passes=self.max_passes, seed=self.seed)
        self.model_ = svm_train_toy(X, y, config, class_specs=self.class_specs)
        self.classes_ = np.unique(np.asarray(y, dtype=np.int64))
        return self

    def predict_proba(self, X):
        return predict_proba_samples(np.asarray(X, dtype=np.float64), self.model_)

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def score(self, X, y):
        return float(np.mean(self.predict(X) == np.asarray(y)))
