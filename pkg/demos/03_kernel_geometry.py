"""
Projection distance and the Grassmann kernel
============================================

Distances between subspaces and the Gaussian kernel built on them.
"""

import numpy as np

from grassfault.grassmann import gram_matrix, orthonormalize, projection_distance, projection_kernel

rng = np.random.default_rng(0)


def point(n=30, d=6):
    return orthonormalize(rng.standard_normal((n, d)))


X1, X2 = point(), point()

# The distance only sees column spaces, so any change of basis is free.
Q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
print("d(X1, X2)      =", projection_distance(X1, X2))
print("d(X1 Q, X2)    =", projection_distance(X1 @ Q, X2))

# Same value as the explicit projector formula, without forming 30 x 30 matrices.
P1, P2 = X1 @ X1.T, X2 @ X2.T
print("projector form =", np.linalg.norm(P1 - P2) / np.sqrt(2))

# Distances lie in [0, sqrt(d)]; orthogonal subspaces reach the top.
E = np.eye(30)
print("orthogonal:", projection_distance(E[:, :6], E[:, 6:12]), "sqrt(6) =", np.sqrt(6))

# k = exp(-beta d^2): 1 on the diagonal, and the Gram matrix stays PSD.
print("k(X1, X2) at beta=3:", projection_kernel(X1, X2, beta=3.0))
pts = [point() for _ in range(100)]
for beta in (0.5, 3.0, 10.0):
    K = gram_matrix(pts, beta)
    print(f"beta={beta:4}: min eigenvalue {np.linalg.eigvalsh(K).min():.3e}")
