"""Supervised SVM-RBF classification, K-Means clustering, and their fusion."""

from .fuse import argmax_labels, colorize, majority_vote
from .kmeans import SpectralKMeans, kmeans_cluster, kmeans_points
from .maps import (
    DEFAULT_CLASSES,
    UNLABELED,
    ClassSpec,
    ClusterMap,
    LabelMap,
    ProbabilityMap,
)
from .metrics import auc_score, macro_auc
from .svm import (
    BinaryClassifier,
    SvmModel,
    load_model,
    model_from_dict,
    model_to_dict,
    predict_proba_samples,
    save_model,
    svm_predict,
)
from .train import RbfSvm, SvmTrainConfig, svm_train_toy

__all__ = [
    "argmax_labels", "colorize", "majority_vote",
    "SpectralKMeans", "kmeans_cluster", "kmeans_points",
    "DEFAULT_CLASSES", "UNLABELED", "ClassSpec", "ClusterMap", "LabelMap",
    "ProbabilityMap",
    "auc_score", "macro_auc",
    "BinaryClassifier", "SvmModel", "load_model", "model_from_dict",
    "model_to_dict", "predict_proba_samples", "save_model", "svm_predict",
    "RbfSvm", "SvmTrainConfig", "svm_train_toy",
]
