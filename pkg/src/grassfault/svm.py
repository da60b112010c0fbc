"""Soft-margin kernel SVM on a precomputed Gram matrix.

Binary problems are solved in the dual with SMO, choosing at each step the
maximal violating pair (the pair with the largest error gap ``E_j - E_i``
among feasible update directions). Multiclass problems are decomposed
one-vs-one and combined by voting.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import warnings

import numpy as np

from .errors import ConvergenceError, DimensionError, ParameterError

DEFAULT_C = 10.0
DEFAULT_TOL = 1e-3
MAX_ITER = 10**6
_TAU = 1e-12


@dataclass
class BinaryModel:
    """One trained binary SVM.

    ``support_indices`` index into the training set the Gram matrix was built
    from; ``dual_coefs[i]`` is ``alpha_i * y_i`` for that support point.
    """

    support_indices: np.ndarray
    dual_coefs: np.ndarray
    bias: float
    class_pair: tuple = (None, None)
    C: float = DEFAULT_C
    converged: bool = True
    n_iter: int = 0
    objective: float = float("nan")


@dataclass
class TrainedClassifier:
    """One-vs-one ensemble plus what prediction needs."""

    models: list
    classes: list
    train_points: list
    beta: float = 3.0
    d: int = 6
    l: int = 5
    C: float = DEFAULT_C
    tol: float = DEFAULT_TOL


def dual_objective(alpha, y, K):
    """``sum(alpha) - 0.5 * (alpha*y)^T K (alpha*y)``."""
    ay = np.asarray(alpha) * np.asarray(y)
    return float(np.sum(alpha) - 0.5 * ay @ K @ ay)


def _check_problem(K, y, C):
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if K.shape != (n, n):
        raise DimensionError(f"Gram matrix shape {K.shape} does not match {n} labels")
    if not np.all(np.isfinite(K)):
        raise ParameterError("Gram matrix has non-finite entries")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ParameterError("binary labels must be +1 or -1")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise ParameterError("binary problem needs both classes present")
    if not (C > 0 and np.isfinite(C)):
        raise ParameterError(f"C must be positive, got {C}")
    return K, y


def smo_solve(K, y, C=DEFAULT_C, tol=DEFAULT_TOL, max_iter=MAX_ITER):
    """Solve the SVM dual; returns ``(alpha, bias, converged, n_iter)``.

    Stops when the maximal KKT violation gap ``m(alpha) - M(alpha)`` drops to
    ``tol`` or after ``max_iter`` pair updates.
    """
    K, y = _check_problem(K, y, C)
    n = len(y)
    alpha = np.zeros(n)
    # gradient of the (minimization) dual: G = Q alpha - 1, Q = yy^T * K
    G = -np.ones(n)
    diag = np.diag(K)
    converged = False
    it = 0
    while it < max_iter:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        score = -y * G
        i = int(np.argmax(np.where(up, score, -np.inf)))
        j = int(np.argmin(np.where(low, score, np.inf)))
        gap = score[i] - score[j]
        if not (up.any() and low.any()) or gap <= tol:
            converged = True
            break
        it += 1

        # move alpha_i along y_i and alpha_j against y_j
        a = diag[i] + diag[j] - 2.0 * K[i, j]
        if a <= 0:
            a = _TAU
        step = gap / a
        # box limits for the step t: alpha_i + y_i t, alpha_j - y_j t
        lim_i = C - alpha[i] if y[i] > 0 else alpha[i]
        lim_j = alpha[j] if y[j] > 0 else C - alpha[j]
        step = min(step, lim_i, lim_j)
        if step <= 0:
            # numerically stuck pair
            break
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        alpha[i] = min(max(alpha[i], 0.0), C)
        alpha[j] = min(max(alpha[j], 0.0), C)
        # G_k changes by Q_ki * dalpha_i + Q_kj * dalpha_j
        G += y * (K[:, i] * step - K[:, j] * step)

    if not converged and it >= max_iter:
        warnings.warn(f"SMO stopped after {it} updates without reaching tol={tol}", RuntimeWarning)
    bias = _bias(alpha, y, G, C)
    return alpha, bias, converged, it


def _bias(alpha, y, G, C):
    score = -y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(np.mean(score[free]))
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
    hi = np.max(score[up]) if up.any() else np.min(score[low])
    lo = np.min(score[low]) if low.any() else np.max(score[up])
    return float(0.5 * (hi + lo))


def train_binary(K, y, C=DEFAULT_C, tol=DEFAULT_TOL, max_iter=MAX_ITER, index=None, class_pair=(None, None)):
    """Train a binary SVM on Gram matrix ``K`` with labels ``y`` in {+1, -1}.

    ``index`` maps rows of ``K`` to positions in a larger training set; the
    stored support indices refer to that set. A solver that hits
    ``max_iter`` returns its last iterate with ``converged=False``.
    """
    K, y = _check_problem(K, y, C)
    alpha, bias, converged, it = smo_solve(K, y, C, tol, max_iter)
    keep = np.flatnonzero(alpha > 0)
    index = np.arange(len(y)) if index is None else np.asarray(index)
    return BinaryModel(
        support_indices=index[keep].astype(np.int64),
        dual_coefs=alpha[keep] * y[keep],
        bias=bias,
        class_pair=tuple(class_pair),
        C=float(C),
        converged=converged,
        n_iter=it,
        objective=dual_objective(alpha, y, K),
    )


def decision_value(model, krow):
    """``sum_i coef_i * krow[support_i] + bias``."""
    krow = np.asarray(krow, dtype=float)
    if len(model.support_indices) and krow.ndim != 1:
        raise DimensionError("kernel row must be 1-D")
    if len(model.support_indices) and model.support_indices.max() >= len(krow):
        raise DimensionError(
            f"kernel row of length {len(krow)} too short for support index {model.support_indices.max()}"
        )
    return float(model.dual_coefs @ krow[model.support_indices] + model.bias)


def class_order(labels):
    """Distinct labels in order of first appearance."""
    seen = {}
    for c in labels:
        seen.setdefault(c, len(seen))
    return list(seen)


def train_multiclass(K, labels, C=DEFAULT_C, tol=DEFAULT_TOL, max_iter=MAX_ITER, threads=1, strict=False):
    """One-vs-one SVMs for every class pair.

    Pair ``(a, b)`` with ``a`` before ``b`` in first-appearance order gets
    labels ``+1`` for ``a`` and ``-1`` for ``b``. Returns the models in
    lexicographic pair order and the class list. With ``strict=True`` a
    non-converged subproblem raises :class:`ConvergenceError`.
    """
    K = np.asarray(K, dtype=float)
    labels = list(labels)
    classes = class_order(labels)
    if len(classes) < 2:
        raise ParameterError("multiclass training needs at least two classes")
    lab = np.array([classes.index(c) for c in labels])
    pairs = [(a, b) for a in range(len(classes)) for b in range(a + 1, len(classes))]

    def fit(pair):
        a, b = pair
        idx = np.flatnonzero((lab == a) | (lab == b))
        y = np.where(lab[idx] == a, 1.0, -1.0)
        return train_binary(K[np.ix_(idx, idx)], y, C, tol, max_iter, index=idx,
                            class_pair=(classes[a], classes[b]))

    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        models = list(pool.map(fit, pairs))
    if strict:
        bad = [m.class_pair for m in models if not m.converged]
        if bad:
            raise ConvergenceError(f"SMO did not converge for pairs {bad}")
    return models, classes


def vote(models, classes, krow):
    """Predicted class and per-model decision values for one kernel row.

    A zero decision value votes for the pair's first class. Ties in the vote
    count go to the class whose winning votes carry the largest total
    ``|decision value|``, then to the earliest class.
    """
    values = [decision_value(m, krow) for m in models]
    index = {c: k for k, c in enumerate(classes)}
    votes = np.zeros(len(classes), dtype=int)
    weight = np.zeros(len(classes))
    for m, v in zip(models, values):
        winner = index[m.class_pair[0] if v >= 0 else m.class_pair[1]]
        votes[winner] += 1
        weight[winner] += abs(v)
    tied = np.flatnonzero(votes == votes.max())
    best = tied[np.argmax(weight[tied])]
    return classes[best], values


def predict(classifier, krow):
    """Predicted class of one kernel row computed against ``classifier.train_points``."""
    krow = np.asarray(krow, dtype=float)
    if len(krow) != len(classifier.train_points):
        raise DimensionError(
            f"kernel row has length {len(krow)}, classifier has {len(classifier.train_points)} training points"
        )
    return vote(classifier.models, classifier.classes, krow)[0]
