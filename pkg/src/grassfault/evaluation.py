"""Stratified k-fold cross-validation and per-class classification metrics."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from . import arma, grassmann, svm
from .errors import ParameterError, UnknownLabelError

METRICS = ("accuracy", "precision", "recall", "f1", "mcc")


@dataclass(frozen=True)
class PipelineConfig:
    """Hyperparameters of the embed / kernel / SVM / CV pipeline."""

    d: int = 6
    l: int = 5
    beta: float = 3.0
    C: float = 10.0
    k: int = 10
    seed: int = 42
    tol: float = 1e-3

    def validate(self, n_features=None):
        for name in ("d", "l", "k"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ParameterError(f"{name} must be a positive integer, got {v}")
        for name in ("beta", "C", "tol"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ParameterError(f"{name} must be positive, got {v}")
        if self.k < 2:
            raise ParameterError(f"k must be >= 2, got {self.k}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ParameterError(f"seed must be a nonnegative integer, got {self.seed}")
        if n_features is not None and self.d > n_features:
            raise ParameterError(f"d={self.d} exceeds the dataset's {n_features} features")
        return self


@dataclass
class FoldAssignment:
    fold_of: np.ndarray
    k: int
    seed: int

    def test_indices(self, fold):
        return np.flatnonzero(self.fold_of == fold)

    def train_indices(self, fold):
        return np.flatnonzero(self.fold_of != fold)


@dataclass
class ConfusionMatrix:
    """Counts with rows = actual class, columns = predicted class."""

    counts: np.ndarray
    classes: list

    @property
    def total(self):
        return int(self.counts.sum())


@dataclass
class MetricsReport:
    per_class: dict
    macro_avg: dict = field(default_factory=dict)
    weighted_avg: dict = field(default_factory=dict)


def stratified_kfold(labels, k=10, seed=42):
    """Assign each sample to one of ``k`` folds, stratified by class.

    Indices of each class (classes in first-appearance order) are shuffled
    with a seeded generator and dealt round-robin. The dealing position
    carries over from one class to the next, so fold sizes differ by at most
    one both per class and overall.
    """
    labels = list(labels)
    n = len(labels)
    k = int(k)
    if k < 2:
        raise ParameterError(f"k must be >= 2, got {k}")
    if k > n:
        raise ParameterError(f"k={k} exceeds the number of samples {n}")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(n, dtype=np.int64)
    classes = svm.class_order(labels)
    index = {c: i for i, c in enumerate(classes)}
    lab = np.array([index[c] for c in labels])
    start = 0
    for c in range(len(classes)):
        idx = np.flatnonzero(lab == c)
        if len(idx) < k:
            warnings.warn(f"class {classes[c]!r} has {len(idx)} samples, fewer than k={k}", RuntimeWarning)
        idx = rng.permutation(idx)
        fold_of[idx] = (start + np.arange(len(idx))) % k
        start = (start + len(idx)) % k
    return FoldAssignment(fold_of, k, seed)


def confusion(actual, predicted, classes):
    actual, predicted = list(actual), list(predicted)
    if len(actual) != len(predicted):
        raise ParameterError(f"{len(actual)} actual labels but {len(predicted)} predictions")
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for a, p in zip(actual, predicted):
        if a not in index or p not in index:
            raise UnknownLabelError(f"label {a if a not in index else p!r} not among classes")
        counts[index[a], index[p]] += 1
    return ConfusionMatrix(counts, list(classes))


def _ratio(num, den):
    return num / den if den else 0.0


def binary_metrics(tp, fn, fp, tn):
    """Accuracy, precision, recall, F1 and MCC from one-vs-rest counts.

    Zero denominators give 0 (for MCC, any zero factor under the root).
    """
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = _ratio(2 * precision * recall, precision + recall)
    den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    mcc = (tp * tn - fp * fn) / math.sqrt(den) if den else 0.0
    return {
        "accuracy": _ratio(tp + tn, tp + tn + fp + fn),
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "mcc": mcc,
        "support": tp + fn,
    }


def per_class_metrics(cm):
    counts = np.asarray(cm.counts, dtype=np.int64)
    total = int(counts.sum())
    out = {}
    for i, c in enumerate(cm.classes):
        tp = int(counts[i, i])
        fn = int(counts[i].sum()) - tp
        fp = int(counts[:, i].sum()) - tp
        out[c] = binary_metrics(tp, fn, fp, total - tp - fn - fp)
    return MetricsReport(per_class=out)


def aggregate(report):
    """Fill in macro (unweighted) and support-weighted averages of ``report``."""
    rows = list(report.per_class.values())
    if not rows:
        raise ParameterError("no per-class metrics to aggregate")
    support = np.array([r["support"] for r in rows], dtype=float)
    macro, weighted = {}, {}
    for m in METRICS:
        vals = np.array([r[m] for r in rows])
        macro[m] = float(np.mean(vals))
        weighted[m] = float(support @ vals / support.sum()) if support.sum() else 0.0
    macro["support"] = weighted["support"] = int(support.sum())
    report.macro_avg, report.weighted_avg = macro, weighted
    return report


def evaluate(actual, predicted, classes):
    """Confusion matrix plus the aggregated metrics report."""
    cm = confusion(actual, predicted, classes)
    return cm, aggregate(per_class_metrics(cm))


@dataclass
class CrossValResult:
    folds: FoldAssignment
    classes: list
    fold_reports: list
    confusions: list
    predictions: np.ndarray
    average: dict


def predict_rows(models, classes, rows):
    return [svm.vote(models, classes, row)[0] for row in rows]


def cross_validate(dataset, config=PipelineConfig(), threads=1, center=True, folds=None):
    """k-fold cross-validation of the full pipeline.

    Embeddings and the kernel matrix are label-free, so both are computed
    once over the whole dataset; each fold slices its train block out of the
    shared Gram matrix. The ``average`` entry is the arithmetic mean over
    folds of each fold's weighted-average metrics. ``folds`` overrides the
    stratified assignment drawn from ``config.seed``.
    """
    config.validate(dataset.n_features)
    labels = list(dataset.labels)
    classes = svm.class_order(labels)
    points = arma.embed_all(dataset.windows, config.d, config.l, threads=threads, center=center)
    K = grassmann.gram_matrix(points, config.beta, threads=threads)
    if folds is None:
        folds = stratified_kfold(labels, config.k, config.seed)
    elif len(folds.fold_of) != len(labels):
        raise ParameterError("fold assignment does not match the dataset size")
    lab = np.array(labels, dtype=object)

    def run(fold):
        tr, te = folds.train_indices(fold), folds.test_indices(fold)
        if len(svm.class_order(lab[tr])) < 2:
            raise ParameterError(f"fold {fold} training split has fewer than two classes")
        models, fold_classes = svm.train_multiclass(K[np.ix_(tr, tr)], lab[tr], config.C, config.tol)
        pred = predict_rows(models, fold_classes, K[np.ix_(te, tr)])
        cm, rep = evaluate(lab[te], pred, classes)
        return te, pred, cm, rep

    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        results = list(pool.map(run, range(folds.k)))

    predictions = np.empty(len(labels), dtype=object)
    for te, pred, _, _ in results:
        predictions[te] = pred
    reports = [r[3] for r in results]
    average = {m: float(np.mean([r.weighted_avg[m] for r in reports])) for m in METRICS}
    return CrossValResult(folds, classes, reports, [r[2] for r in results], predictions, average)
