"""Subspace geometry on the Grassmann manifold.

Points are stored as ``n x d`` matrices with orthonormal columns. Two
representatives spanning the same column space describe the same point, so
everything here depends on ``X`` only through ``X @ X.T``.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import DimensionError, ParameterError, RankDeficiencyError

RANK_RTOL = 1e-12


def canonical_signs(X):
    """Flip columns so the largest-magnitude entry of each is nonnegative."""
    X = np.array(X, dtype=float, copy=True)
    if X.size == 0:
        return X
    idx = np.argmax(np.abs(X), axis=0)
    signs = np.where(X[idx, np.arange(X.shape[1])] < 0, -1.0, 1.0)
    return X * signs


def orthonormalize(M):
    """Orthonormal basis for the column space of ``M``.

    Uses a thin QR factorization followed by the canonical sign convention,
    so an already orthonormal, sign-canonical input is returned unchanged.

    Raises
    ------
    RankDeficiencyError
        If ``M`` is not of full column rank (``s_d < 1e-12 * s_1``).
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {M.shape}")
    n, d = M.shape
    if d == 0 or d > n:
        raise DimensionError(f"cannot orthonormalize a {n}x{d} matrix")
    if not np.all(np.isfinite(M)):
        raise ParameterError("matrix contains non-finite entries")
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0 or s[-1] < RANK_RTOL * s[0]:
        raise RankDeficiencyError(
            f"matrix has numerical rank below {d} (s_min/s_max = "
            f"{s[-1] / s[0] if s[0] else 0.0:.3e})"
        )
    Q, _ = np.linalg.qr(M, mode="reduced")
    return canonical_signs(Q)


def _check_pair(X1, X2):
    X1 = np.asarray(X1, dtype=float)
    X2 = np.asarray(X2, dtype=float)
    if X1.ndim != 2 or X1.shape != X2.shape:
        raise DimensionError(
            f"points must share shape, got {X1.shape} and {X2.shape}"
        )
    return X1, X2


def _residual(X1, X2):
    # ||(I - X1 X1^T) X2||_F^2 == d - ||X1^T X2||_F^2 without the cancellation;
    # averaged over both orders so swapping the arguments gives the same bits.
    a = np.sum(np.square(X2 - X1 @ (X1.T @ X2)))
    b = np.sum(np.square(X1 - X2 @ (X2.T @ X1)))
    return 0.5 * (a + b)


def squared_projection_distance(X1, X2):
    """Squared projection distance, equal to ``d - ||X1^T X2||_F^2``."""
    X1, X2 = _check_pair(X1, X2)
    return min(_residual(X1, X2), float(X1.shape[1]))


def projection_distance(X1, X2):
    """Projection distance ``2**-0.5 * ||X1 X1^T - X2 X2^T||_F``.

    Evaluated as the norm of the component of ``X2`` orthogonal to ``span(X1)``,
    which equals ``sqrt(d - ||X1^T X2||_F**2)``, so the ``n x n`` projectors
    are never formed and nearby subspaces keep full relative accuracy. The
    result lies in ``[0, sqrt(d)]``.
    """
    return float(np.sqrt(squared_projection_distance(X1, X2)))


def _check_beta(beta):
    beta = float(beta)
    if not np.isfinite(beta) or beta <= 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    return beta


def projection_kernel(X1, X2, beta=3.0):
    """Gaussian kernel ``exp(-beta * dist**2)`` under the projection metric."""
    beta = _check_beta(beta)
    return float(np.exp(-beta * squared_projection_distance(X1, X2)))


def _stack(points):
    if len(points) == 0:
        return None
    arr = np.stack([np.asarray(p, dtype=float) for p in points])
    if arr.ndim != 3:
        raise DimensionError("points must be 2-D matrices")
    return arr


def _row(X, stack, beta):
    X = np.asarray(X, dtype=float)
    if X.shape != stack.shape[1:]:
        raise DimensionError(
            f"point has shape {X.shape}, training points have {stack.shape[1:]}"
        )
    a = np.sum(np.square(stack - X @ (X.T @ stack)), axis=(1, 2))
    b = np.sum(np.square(X - stack @ (np.swapaxes(stack, 1, 2) @ X)), axis=(1, 2))
    d2 = np.minimum(0.5 * (a + b), X.shape[1])
    return np.exp(-beta * d2)


def kernel_row(point, train_points, beta=3.0):
    """Kernel values between ``point`` and every entry of ``train_points``."""
    beta = _check_beta(beta)
    stack = _stack(train_points)
    if stack is None:
        return np.zeros(0)
    return _row(point, stack, beta)


def cross_gram(points, train_points, beta=3.0, threads=1):
    """Rectangular kernel matrix, one :func:`kernel_row` per query point."""
    beta = _check_beta(beta)
    stack = _stack(train_points)
    if stack is None:
        return np.zeros((len(points), 0))
    if len(points) == 0:
        return np.zeros((0, len(stack)))
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        rows = list(pool.map(lambda p: _row(p, stack, beta), points))
    return np.vstack(rows)


def gram_matrix(points, beta=3.0, threads=1):
    """Symmetric Gram matrix of the projection kernel over ``points``.

    Each unordered pair is evaluated once and mirrored. Rows of the upper
    triangle are independent, so ``threads > 1`` fans them out without
    changing a single bit of the result.
    """
    beta = _check_beta(beta)
    stack = _stack(points)
    if stack is None:
        raise ParameterError("gram_matrix needs at least one point")
    N = len(stack)
    K = np.empty((N, N))

    def fill(i):
        K[i, i:] = _row(stack[i], stack[i:], beta)

    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        list(pool.map(fill, range(N)))
    iu = np.triu_indices(N, 1)
    K[iu[1], iu[0]] = K[iu]
    return K
