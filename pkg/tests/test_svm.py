import numpy as np
import pytest

from grassfault import svm
from grassfault.errors import ConvergenceError, DimensionError, ParameterError
from grassfault.grassmann import gram_matrix, kernel_row

from oracles import brute_force_dual, random_point


def random_problem(seed, n=None):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(2, 9))
    # Gram of random lines in R^3 (d = 1 Grassmann points)
    pts = [random_point(rng, 3, 1) for _ in range(n)]
    K = gram_matrix(pts, float(rng.uniform(0.5, 5.0)))
    y = rng.choice([-1.0, 1.0], size=n)
    y[0], y[1] = 1.0, -1.0
    C = float(rng.choice([0.5, 1.0, 10.0]))
    return K, y, C


def test_two_point_closed_form():
    k = 0.1
    K = np.array([[1.0, k], [k, 1.0]])
    m = svm.train_binary(K, [1.0, -1.0], C=10.0, tol=1e-10)
    alpha = np.abs(m.dual_coefs)
    np.testing.assert_allclose(alpha, 10 / 9, atol=1e-10)
    assert m.bias == pytest.approx(0.0, abs=1e-10)
    assert svm.decision_value(m, K[0]) == pytest.approx(1.0, abs=1e-8)
    assert svm.decision_value(m, K[1]) == pytest.approx(-1.0, abs=1e-8)
    assert svm.decision_value(m, np.zeros(2)) == m.bias


def test_two_point_capped_by_C():
    K = np.array([[1.0, 0.1], [0.1, 1.0]])
    m = svm.train_binary(K, [1.0, -1.0], C=0.5)
    np.testing.assert_allclose(np.abs(m.dual_coefs), 0.5)


def test_conflicting_duplicates():
    K = np.ones((2, 2))
    m = svm.train_binary(K, [1.0, -1.0], C=3.0)
    np.testing.assert_allclose(np.abs(m.dual_coefs), 3.0)
    assert svm.decision_value(m, K[0]) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(25))
def test_smo_matches_brute_force(seed):
    K, y, C = random_problem(seed)
    m = svm.train_binary(K, y, C, tol=1e-9)
    best, _ = brute_force_dual(K, y, C)
    assert m.converged
    assert abs(m.objective - best) <= 1e-6
    alpha = np.zeros(len(y))
    alpha[m.support_indices] = m.dual_coefs * y[m.support_indices]
    assert np.all(alpha >= 0) and np.all(alpha <= C + 1e-12)
    assert abs(alpha @ y) <= 1e-8


def test_free_support_vectors_on_margin():
    K, y, C = random_problem(3, n=8)
    tol = 1e-6
    m = svm.train_binary(K, y, C, tol=tol)
    for i, coef in zip(m.support_indices, m.dual_coefs):
        if abs(coef) < C - 1e-9:
            assert abs(y[i] * svm.decision_value(m, K[i]) - 1.0) <= 10 * tol


def test_binary_errors():
    K = np.eye(3)
    with pytest.raises(ParameterError):
        svm.train_binary(K, [1.0, 1.0, 1.0])
    with pytest.raises(ParameterError):
        svm.train_binary(np.array([[1.0, np.nan], [np.nan, 1.0]]), [1.0, -1.0])
    with pytest.raises(ParameterError):
        svm.train_binary(np.eye(2), [1.0, -1.0], C=0.0)
    with pytest.raises(DimensionError):
        svm.train_binary(np.eye(3), [1.0, -1.0])


def test_iteration_cap_flags_nonconvergence():
    K, y, C = random_problem(4, n=8)
    with pytest.warns(RuntimeWarning):
        m = svm.train_binary(K, y, C, tol=1e-12, max_iter=1)
    assert not m.converged


def test_decision_value_length_mismatch():
    K = np.array([[1.0, 0.1], [0.1, 1.0]])
    m = svm.train_binary(K, [1.0, -1.0])
    with pytest.raises(DimensionError):
        svm.decision_value(m, [1.0])


def clustered_points(seed, n_classes=3, per_class=8, spread=0.05):
    rng = np.random.default_rng(seed)
    centers = [random_point(rng, 30, 6) for _ in range(n_classes)]
    pts, labels = [], []
    for c, X in enumerate(centers):
        for _ in range(per_class):
            Q, _ = np.linalg.qr(X + spread * rng.standard_normal(X.shape))
            pts.append(Q)
            labels.append(f"c{c}")
    return pts, labels


def test_multiclass_model_count():
    labels = [f"k{i}" for i in range(12)] * 2
    K = np.eye(24) * 0.5 + 0.5
    models, classes = svm.train_multiclass(K, labels)
    assert len(models) == 66
    assert classes == [f"k{i}" for i in range(12)]
    assert [m.class_pair for m in models][:2] == [("k0", "k1"), ("k0", "k2")]


def test_multiclass_separable_training_accuracy():
    pts, labels = clustered_points(0)
    K = gram_matrix(pts, 3.0)
    models, classes = svm.train_multiclass(K, labels)
    clf = svm.TrainedClassifier(models, classes, pts)
    assert [svm.predict(clf, K[i]) for i in range(len(pts))] == labels
    for m in models:
        assert m.converged
        assert np.all(m.support_indices < len(pts))


def test_two_class_multiclass_is_sign_rule():
    pts, labels = clustered_points(1, n_classes=2)
    K = gram_matrix(pts, 3.0)
    models, classes = svm.train_multiclass(K, labels)
    assert len(models) == 1
    clf = svm.TrainedClassifier(models, classes, pts)
    rng = np.random.default_rng(2)
    for _ in range(10):
        row = kernel_row(random_point(rng, 30, 6), pts, 3.0)
        v = svm.decision_value(models[0], row)
        assert svm.predict(clf, row) == (classes[0] if v >= 0 else classes[1])


def test_vote_cycle_tie_break():
    def stub(pair, bias):
        return svm.BinaryModel(np.zeros(0, dtype=np.int64), np.zeros(0), bias, pair)

    # a beats b (0.2), b beats c (0.9), c beats a (0.5): one vote each
    models = [stub(("a", "b"), 0.2), stub(("a", "c"), -0.5), stub(("b", "c"), 0.9)]
    label, values = svm.vote(models, ["a", "b", "c"], np.zeros(3))
    assert label == "b"
    assert values == [0.2, -0.5, 0.9]
    # zero decision value votes for the pair's first class
    assert svm.vote([stub(("a", "b"), 0.0)], ["a", "b"], np.zeros(1))[0] == "a"
    # equal weights fall back to class order
    models = [stub(("a", "b"), 0.5), stub(("a", "c"), -0.5), stub(("b", "c"), 0.5)]
    assert svm.vote(models, ["a", "b", "c"], np.zeros(3))[0] == "a"


def test_predict_length_mismatch():
    pts, labels = clustered_points(3)
    K = gram_matrix(pts, 3.0)
    models, classes = svm.train_multiclass(K, labels)
    clf = svm.TrainedClassifier(models, classes, pts)
    with pytest.raises(DimensionError):
        svm.predict(clf, K[0, :-1])


def test_permutation_invariance():
    pts, labels = clustered_points(4, spread=0.15)
    rng = np.random.default_rng(5)
    tests = [random_point(rng, 30, 6) for _ in range(5)] + [pts[0], pts[9], pts[20]]

    def fit_predict(order):
        P = [pts[i] for i in order]
        L = [labels[i] for i in order]
        models, classes = svm.train_multiclass(gram_matrix(P, 3.0), L, tol=1e-6)
        clf = svm.TrainedClassifier(models, classes, P)
        return [svm.predict(clf, kernel_row(t, P, 3.0)) for t in tests]

    base = fit_predict(range(len(pts)))
    for seed in range(3):
        assert fit_predict(np.random.default_rng(seed).permutation(len(pts))) == base


def test_multiclass_errors():
    with pytest.raises(ParameterError):
        svm.train_multiclass(np.eye(3), ["a", "a", "a"])


def test_strict_mode_raises_on_nonconvergence():
    K, y, C = random_problem(6, n=8)
    labels = ["p" if v > 0 else "n" for v in y]
    with pytest.warns(RuntimeWarning), pytest.raises(ConvergenceError):
        svm.train_multiclass(K, labels, C, tol=1e-12, max_iter=1, strict=True)


def test_multiclass_threads_identical():
    pts, labels = clustered_points(7, n_classes=4)
    K = gram_matrix(pts, 3.0)
    a, _ = svm.train_multiclass(K, labels, threads=1)
    b, _ = svm.train_multiclass(K, labels, threads=4)
    for x, z in zip(a, b):
        np.testing.assert_array_equal(x.support_indices, z.support_indices)
        np.testing.assert_array_equal(x.dual_coefs, z.dual_coefs)
        assert x.bias == z.bias
