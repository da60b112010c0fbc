"""
Ten-fold cross-validation on the desk dataset
=============================================

The full pipeline: generate, embed, kernel, SVM, stratified folds, metrics.
"""

import time

import numpy as np

from grassfault import signalgen as sg
from grassfault.evaluation import PipelineConfig, cross_validate

ds = sg.generate_dataset(sg.desk_grid(seed=0))
config = PipelineConfig()  # d=6, l=5, beta=3, C=10, k=10
start = time.perf_counter()
res = cross_validate(ds, config, threads=4)
print(f"{len(ds)} windows, {config.k} folds, {time.perf_counter() - start:.1f} s")

# Per-fold weighted averages, then their mean.
print(f"{'fold':>7}" + "".join(f"{m:>10}" for m in res.average))
for i, rep in enumerate(res.fold_reports, 1):
    print(f"{i:>7}" + "".join(f"{rep.weighted_avg[m]:10.4f}" for m in res.average))
print(f"{'mean':>7}" + "".join(f"{v:10.4f}" for v in res.average.values()))

# Pooled confusion matrix over all folds; off-diagonal cells are the errors.
counts = sum(cm.counts for cm in res.confusions)
names = [c.value for c in res.classes]
print("      " + " ".join(f"{n:>4}" for n in names))
for n, row in zip(names, counts):
    print(f"{n:>5} " + " ".join(f"{v:4d}" for v in row))
errors = [(names[i], names[j], int(counts[i, j])) for i, j in zip(*np.nonzero(counts)) if i != j]
print("confusions (actual, predicted, count):", errors)
