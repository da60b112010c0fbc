"""Time-series window classification on the Grassmann manifold.

Windows are fitted with an SVD-based ARMA model, mapped to the column space
of their truncated observability matrix, and classified with a kernel SVM
under the projection-metric Gaussian kernel.
"""
from .arma import ArmaModel, embed_all, fit_arma, grassmann_embed, observability
from .evaluation import PipelineConfig, cross_validate, stratified_kfold
from .grassmann import (gram_matrix, kernel_row, orthonormalize, projection_distance,
                        projection_kernel)
from .signalgen import CaseParams, FaultClass, LabeledDataset, generate_case, generate_dataset, load_csv, save_csv
from .svm import TrainedClassifier, predict, train_binary, train_multiclass

__version__ = "0.1.0"

__all__ = [
    "ArmaModel", "embed_all", "fit_arma", "grassmann_embed", "observability",
    "PipelineConfig", "cross_validate", "stratified_kfold",
    "gram_matrix", "kernel_row", "orthonormalize", "projection_distance", "projection_kernel",
    "CaseParams", "FaultClass", "LabeledDataset", "generate_case", "generate_dataset", "load_csv", "save_csv",
    "TrainedClassifier", "predict", "train_binary", "train_multiclass",
]
