"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed
in the terminal summary (see conftest.py)."""
import json
import time

import numpy as np
import pytest

from grassfault import cli
from grassfault import evaluation as ev
from grassfault import signalgen as sg
from grassfault import svm
from grassfault.arma import grassmann_embed
from grassfault.grassmann import gram_matrix, orthonormalize, projection_distance

from oracles import (brute_force_dual, projector_distance, random_orthogonal, random_point,
                     simulate_lds, stable_lds, true_observability, well_posed_lds)
from test_evaluation import PUBLISHED_FOLD, reconstruct


@pytest.fixture
def record(acceptance_log, request):
    def _record(ok, detail):
        acceptance_log.append((request.node.name, bool(ok), detail))
        assert ok, detail
    return _record


def test_c1_metric_oracle_published_rows(record):
    start = time.perf_counter()
    rows = {r[0]: r for r in PUBLISHED_FOLD}
    named = {"CAG": (145, 2, 0, 1666), "ABG": (144, 0, 1, 1668), "TSC": (154, 1, 1, 1657)}
    worst = 0.0
    for cls, counts in named.items():
        _, acc, prec, rec, f1, support = rows[cls]
        # the counts are first rederived from the printed row
        assert reconstruct(support, prec, rec) == counts
        m = ev.binary_metrics(*counts)
        for key, want in (("accuracy", acc), ("precision", prec), ("recall", rec), ("f1", f1)):
            worst = max(worst, abs(m[key] - want))
    elapsed = time.perf_counter() - start
    record(worst <= 5e-5 and elapsed < 1.0, f"max |err| {worst:.2e} (tol 5e-5), {elapsed * 1e3:.1f} ms")


def test_c2_aggregation_oracle(record):
    per_class = {c: dict(accuracy=a, precision=p, recall=r, f1=f, mcc=0.0, support=s)
                 for c, a, p, r, f, s in PUBLISHED_FOLD}
    rep = ev.aggregate(ev.MetricsReport(per_class))
    em = abs(rep.macro_avg["f1"] - 0.99732)
    ew = abs(rep.weighted_avg["f1"] - 0.99724)
    record(max(em, ew) <= 5e-5,
           f"macro F1 {rep.macro_avg['f1']:.5f}, weighted F1 {rep.weighted_avg['f1']:.5f}")


def test_c3_geometry_suite(record):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    formula = invariance = 0.0
    for _ in range(1000):
        X1, X2 = random_point(rng, 30, 6), random_point(rng, 30, 6)
        d = projection_distance(X1, X2)
        formula = max(formula, abs(d - projector_distance(X1, X2)))
        R1, R2 = random_orthogonal(rng, 6), random_orthogonal(rng, 6)
        invariance = max(invariance, abs(projection_distance(X1 @ R1, X2 @ R2) - d))
    slack = 0.0
    for _ in range(1000):
        A, B, C = (random_point(rng, 30, 6) for _ in range(3))
        ab, bc, ac = projection_distance(A, B), projection_distance(B, C), projection_distance(A, C)
        slack = max(slack, ac - ab - bc)
    elapsed = time.perf_counter() - start
    ok = formula <= 1e-10 and invariance <= 1e-10 and slack <= 1e-9 and elapsed < 10.0
    record(ok, f"formula {formula:.1e}, invariance {invariance:.1e}, "
               f"triangle excess {slack:.1e}, {elapsed:.2f} s")


def test_c4_kernel_psd(record):
    rng = np.random.default_rng(7)
    pts = [random_point(rng, 30, 6) for _ in range(200)]
    mins = {b: float(np.linalg.eigvalsh(gram_matrix(pts, b)).min()) for b in (0.5, 3.0, 10.0)}
    record(min(mins.values()) >= -1e-8, ", ".join(f"beta={b}: {v:.2e}" for b, v in mins.items()))


def test_c5_lds_recovery(record):
    clean, noisy = [], []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        H, P = stable_lds(rng, 6, 6)
        truth = orthonormalize(true_observability(H, P, 5))
        Y = simulate_lds(H, P, rng.standard_normal(6), 200)
        clean.append(projection_distance(grassmann_embed(Y, 6, 5, center=False), truth))
        # noise needs every mode excited and separable; see well_posed_lds
        H, P, x0 = well_posed_lds(rng, 6, 6)
        truth = orthonormalize(true_observability(H, P, 5))
        Yn = simulate_lds(H, P, x0, 200, noise_snr_db=40.0, rng=rng)
        noisy.append(projection_distance(grassmann_embed(Yn, 6, 5, center=False), truth))
    record(max(clean) <= 1e-6 and max(noisy) <= 0.05,
           f"noiseless max {max(clean):.1e} (tol 1e-6), 40 dB max {max(noisy):.3f} (tol 0.05)")


def test_c6_smo_oracle(record):
    rng = np.random.default_rng(11)
    worst, feasible = 0.0, True
    for _ in range(50):
        n = int(rng.integers(2, 9))
        A = rng.standard_normal((n, int(rng.integers(1, n + 1))))
        K = A @ A.T
        y = rng.choice([-1.0, 1.0], size=n)
        y[0], y[1] = 1.0, -1.0
        C = float(rng.choice([0.1, 1.0, 10.0]))
        m = svm.train_binary(K, y, C, tol=1e-9)
        best, _ = brute_force_dual(K, y, C)
        worst = max(worst, abs(m.objective - best))
        alpha = np.zeros(n)
        alpha[m.support_indices] = m.dual_coefs * y[m.support_indices]
        feasible &= bool(np.all(alpha >= 0) and np.all(alpha <= C) and abs(alpha @ y) <= 1e-9
                         and m.converged)
    record(worst <= 1e-6 and feasible, f"max objective gap {worst:.1e}, feasible={feasible}")


@pytest.fixture(scope="module")
def desk_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("desk") / "desk.csv"
    assert cli.main(["generate", "--out", str(path)]) == 0
    return path


def _crossval(desk_csv, out, threads):
    assert cli.main(["crossval", str(desk_csv), "--out", str(out), "--threads", str(threads)]) == 0
    return json.loads((out / "report.json").read_text())


def test_c7_desk_run(record):
    start = time.perf_counter()
    ds = sg.generate_dataset(sg.desk_grid())
    res = ev.cross_validate(ds, ev.PipelineConfig(), threads=1)
    elapsed = time.perf_counter() - start
    acc = res.average["accuracy"]
    macro_f1 = float(np.mean([r.macro_avg["f1"] for r in res.fold_reports]))
    ok = len(ds) >= 300 and len(res.classes) == 12 and acc >= 0.95 and macro_f1 >= 0.93 and elapsed <= 300
    record(ok, f"{len(ds)} windows, weighted accuracy {acc:.4f} (>= 0.95), "
               f"macro F1 {macro_f1:.4f} (>= 0.93), {elapsed:.1f} s single-threaded")


def test_c8_determinism(record, desk_csv, tmp_path):
    a = _crossval(desk_csv, tmp_path / "a", 1)
    _crossval(desk_csv, tmp_path / "b", 1)
    _crossval(desk_csv, tmp_path / "c", 4)
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    same = all((tmp_path / "a" / f).read_bytes() == (tmp_path / run / f).read_bytes()
               for run in ("b", "c") for f in files)
    record(same and len(files) == 12, f"{len(files)} report files identical across 2 runs "
                                      f"and threads 1 vs 4: {same}; average accuracy "
                                      f"{a['average']['accuracy']:.4f}")
