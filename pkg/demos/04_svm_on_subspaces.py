"""
A one-vs-one SVM on a precomputed Grassmann kernel
==================================================

Train on embedded windows and classify new ones.
"""

import numpy as np

from grassfault import signalgen as sg
from grassfault.arma import embed_all
from grassfault.grassmann import gram_matrix, kernel_row
from grassfault.svm import TrainedClassifier, predict, train_binary, train_multiclass

# Binary SVM first: two points with kernel value 0.1 between them.
K = np.array([[1.0, 0.1], [0.1, 1.0]])
m = train_binary(K, [1.0, -1.0], C=10.0, tol=1e-10)
print("alphas:", np.abs(m.dual_coefs), "(closed form 1/(1-k) =", 1 / 0.9, ")")

# Three classes, a small training grid.
grid = sg.case_grid(["AG", "BC", "TSC"], locations=(2.0, 10.0, 20.0), resistances=(0.2, 6.0),
                    angles=(0.0, 90.0), seed=0)
train = sg.generate_dataset(grid)
pts = embed_all(train.windows)
models, classes = train_multiclass(gram_matrix(pts, 3.0), train.labels, C=10.0)
clf = TrainedClassifier(models, classes, pts, beta=3.0)
for mod in models:
    print("-".join(c.value for c in mod.class_pair), "support vectors:", len(mod.support_indices), "converged:", mod.converged)

# Unseen settings: a location and resistance off the training grid.
test = sg.generate_dataset(sg.case_grid(["AG", "BC", "TSC"], locations=(15.0,), resistances=(3.0,),
                                        angles=(45.0,), seed=100))
for X, label in zip(embed_all(test.windows), test.labels):
    print("actual", label.value, "predicted", predict(clf, kernel_row(X, pts, 3.0)).value)
