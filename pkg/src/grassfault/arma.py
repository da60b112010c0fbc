"""SVD-based ARMA (linear dynamical system) fitting and observability subspaces.

A window ``g(1), ..., g(tau)`` of ``r`` features is modelled as

    g(t) = H x(t),    x(t+1) = P x(t)

with a ``d``-dimensional hidden state. ``H`` comes from the leading left
singular vectors of the data matrix and ``P`` from a least-squares fit of
the state sequence ``Lambda M^T`` to its own one-step shift.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, DimensionError, ParameterError, RankDeficiencyError
from .grassmann import orthonormalize

RANK_RTOL = 1e-12
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class ArmaModel:
    """Fitted state-space model.

    Attributes
    ----------
    H : ndarray, shape (r, d)
        Observation matrix with orthonormal columns.
    P : ndarray, shape (d, d)
        State transition matrix (not stabilized).
    singular_values : ndarray, shape (d,)
        Leading singular values of the (centered) data matrix.
    """

    H: np.ndarray
    P: np.ndarray
    singular_values: np.ndarray

    @property
    def d(self):
        return self.P.shape[0]

    @property
    def r(self):
        return self.H.shape[0]


def fit_arma(window, d=6, center=True):
    """Fit ``(H, P)`` to a ``tau x r`` window.

    Parameters
    ----------
    window : array_like, shape (tau, r)
        Time along axis 0, features along axis 1.
    d : int
        Hidden state dimension, ``1 <= d <= min(r, tau - 1)``.
    center : bool
        Subtract each feature's temporal mean before the SVD.

    Raises
    ------
    RankDeficiencyError
        If the data matrix has fewer than ``d`` singular values above
        ``1e-12`` times the largest.
    ConditioningError
        If the state Gram matrix ``M^T E_2 M`` has condition number above 1e12.
    """
    Y = np.asarray(window, dtype=float)
    if Y.ndim != 2:
        raise DimensionError(f"window must be 2-D, got shape {Y.shape}")
    tau, r = Y.shape
    d = int(d)
    if d < 1 or d > min(r, tau - 1):
        raise ParameterError(f"hidden dimension d={d} outside [1, min(r={r}, tau-1={tau - 1})]")
    if not np.all(np.isfinite(Y)):
        raise ParameterError("window contains non-finite values")
    if center:
        Y = Y - Y.mean(axis=0)

    # data matrix is r x tau: columns are observations
    L, s, Mt = np.linalg.svd(Y.T, full_matrices=False)
    if s[0] == 0.0 or s[d - 1] < RANK_RTOL * s[0]:
        raise RankDeficiencyError(
            f"window has numerical rank below d={d}"
        )
    L = L[:, :d]
    s = s[:d]
    M = Mt[:d].T

    # M^T E1 M = sum_t M[t+1]^T M[t];  M^T E2 M = sum_t M[t]^T M[t], t < tau-1
    shift = M[1:].T @ M[:-1]
    inner = M[:-1].T @ M[:-1]
    cond = np.linalg.cond(inner)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise ConditioningError(f"state Gram matrix condition number {cond:.3e} exceeds {MAX_CONDITION:.0e}")
    # P = diag(s) shift inner^{-1} diag(s)^{-1}
    P = (s[:, None] * np.linalg.solve(inner.T, shift.T).T) / s[None, :]
    return ArmaModel(H=L, P=P, singular_values=s)


def observability(model, l=5):
    """Finite observability matrix ``[H; HP; ...; HP^(l-1)]``, shape ``(l*r, d)``."""
    l = int(l)
    if l < 1:
        raise ParameterError(f"truncation length must be >= 1, got {l}")
    blocks = [model.H]
    for _ in range(l - 1):
        blocks.append(blocks[-1] @ model.P)
    return np.vstack(blocks)


def grassmann_embed(window, d=6, l=5, center=True):
    """Grassmann point of a window: orthonormalized observability matrix."""
    return orthonormalize(observability(fit_arma(window, d, center=center), l))


def embed_all(windows, d=6, l=5, threads=1, center=True):
    """Embed a sequence of windows; order of the output follows the input."""
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        return list(pool.map(lambda w: grassmann_embed(w, d, l, center=center), windows))
