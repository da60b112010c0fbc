"""Independent reference computations used to check the library."""
import itertools

import numpy as np


def projector_distance(X1, X2):
    """Projection distance straight from the projector-difference definition."""
    Q1, _ = np.linalg.qr(X1)
    Q2, _ = np.linalg.qr(X2)
    return np.linalg.norm(Q1 @ Q1.T - Q2 @ Q2.T, "fro") / np.sqrt(2.0)


def random_point(rng, n, d):
    Q, _ = np.linalg.qr(rng.standard_normal((n, d)))
    return Q


def random_orthogonal(rng, d):
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    return Q * np.sign(np.diag(R))


def simulate_lds(H, P, x0, tau, noise_snr_db=None, rng=None):
    """``tau x r`` outputs of ``g = H x, x <- P x`` with optional white noise."""
    x = np.array(x0, dtype=float)
    out = np.empty((tau, H.shape[0]))
    for t in range(tau):
        out[t] = H @ x
        x = P @ x
    if noise_snr_db is not None:
        rms = np.sqrt(np.mean(out**2, axis=0))
        out = out + rng.standard_normal(out.shape) * rms * 10.0 ** (-noise_snr_db / 20.0)
    return out


def stable_lds(rng, r, d, radius=0.9):
    H = random_point(rng, r, d)
    A = rng.standard_normal((d, d))
    P = radius * A / np.max(np.abs(np.linalg.eigvals(A)))
    return H, P


def well_posed_lds(rng, r, d):
    """Stable, identifiable system for noisy recovery checks.

    Rotation blocks with moduli in [0.95, 0.99] and frequencies at least
    0.2 rad apart, conjugated by a random orthogonal matrix; ``x0`` excites
    every mode. Generic ``stable_lds`` draws can contain modes that vanish
    within a few samples or nearly coincide, which no estimator can separate
    from noise.
    """
    k = d // 2
    theta = 0.15 + 0.4 * np.arange(k) + rng.uniform(0.0, 0.2, k)
    P = np.zeros((d, d))
    for i in range(k):
        c, s = np.cos(theta[i]), np.sin(theta[i])
        P[2 * i:2 * i + 2, 2 * i:2 * i + 2] = rng.uniform(0.95, 0.99) * np.array([[c, -s], [s, c]])
    Q = random_orthogonal(rng, d)
    return random_point(rng, r, d), Q @ P @ Q.T, Q @ np.tile([1.0, 0.0], k)


def true_observability(H, P, l):
    blocks = [H]
    for _ in range(l - 1):
        blocks.append(blocks[-1] @ P)
    return np.vstack(blocks)


def brute_force_dual(K, y, C, tol=1e-9):
    """Global optimum of the SVM dual by enumerating active sets.

    Each alpha_i is fixed at 0, fixed at C, or free. For every assignment the
    equality-constrained stationarity system over the free variables is
    solved; feasible stationary points are scored and the best is returned.
    Concavity makes the best feasible candidate the global maximum.
    """
    K = np.asarray(K, float)
    y = np.asarray(y, float)
    n = len(y)
    Q = np.outer(y, y) * K
    best, best_alpha = -np.inf, None
    for state in itertools.product((0, 1, 2), repeat=n):
        state = np.array(state)
        alpha = np.where(state == 1, C, 0.0)
        free = np.flatnonzero(state == 2)
        if free.size:
            fixed = np.flatnonzero(state != 2)
            # maximize sum(a) - 0.5 a^T Q a s.t. y^T a = 0: KKT system in (a_free, mu)
            m = free.size
            A = np.zeros((m + 1, m + 1))
            A[:m, :m] = Q[np.ix_(free, free)]
            A[:m, m] = y[free]
            A[m, :m] = y[free]
            rhs = np.zeros(m + 1)
            rhs[:m] = 1.0 - Q[np.ix_(free, fixed)] @ alpha[fixed]
            rhs[m] = -y[fixed] @ alpha[fixed]
            sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            if np.linalg.norm(A @ sol - rhs) > 1e-8 * (1 + np.linalg.norm(rhs)):
                continue
            alpha[free] = sol[:m]
        if abs(y @ alpha) > 1e-8 or np.any(alpha < -tol) or np.any(alpha > C + tol):
            continue
        alpha = np.clip(alpha, 0.0, C)
        obj = alpha.sum() - 0.5 * alpha @ Q @ alpha
        if obj > best:
            best, best_alpha = obj, alpha
    return best, best_alpha
