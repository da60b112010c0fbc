"""
From a window to a point on the Grassmann manifold
==================================================

Fit a linear dynamical system to a window, stack its observability matrix
and keep the orthonormal column space.
"""

import numpy as np

from grassfault import signalgen as sg
from grassfault.arma import fit_arma, grassmann_embed, observability
from grassfault.grassmann import orthonormalize, projection_distance

w = sg.generate_case(sg.CaseParams("BCG", resistance_ohm=2.0, seed=1))

# The SVD of the data gives the output matrix H (left singular vectors) and
# a least-squares transition matrix P between consecutive states.
model = fit_arma(w, d=6)
print("H:", model.H.shape, "P:", model.P.shape)
print("singular values:", np.round(model.singular_values, 3))
print("|eig(P)|:", np.round(np.sort(np.abs(np.linalg.eigvals(model.P)))[::-1], 3))

# Five observability blocks give a 30 x 6 matrix; its thin QR factor is the
# subspace used downstream.
O = observability(model, l=5)
X = orthonormalize(O)
print("O:", O.shape, "X orthonormal:", np.allclose(X.T @ X, np.eye(6)))
print("same as grassmann_embed:", np.allclose(X, grassmann_embed(w)))

# Amplitude scaling changes nothing: the embedding is a subspace.
print("distance to 10x scaled window:", projection_distance(X, grassmann_embed(10 * w)))

# Windows of one class sit closer together than windows of different classes.
same = grassmann_embed(sg.generate_case(sg.CaseParams("BCG", resistance_ohm=6.0, seed=2)))
other = grassmann_embed(sg.generate_case(sg.CaseParams("AB", resistance_ohm=2.0, seed=3)))
print(f"BCG vs BCG: {projection_distance(X, same):.3f}")
print(f"BCG vs AB:  {projection_distance(X, other):.3f}")
