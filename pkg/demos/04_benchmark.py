"""Run the cross-validation harness over several strategies and two
datasets, then test each pair of strategies with the Wilcoxon
signed-rank test on per-dataset mean accuracies.

With only two datasets the signed-rank test has too few non-zero
differences to produce a p-value (it needs at least five), so the
pairwise table reports wins/losses/draws only -- exactly what the
harness does on small studies.
"""

import itertools

import numpy as np

from svmtree.data import Dataset
from svmtree.evaluation import HyperGrid, emit_report, run_cv, \
    wilcoxon_signed_rank


def blobs(n_classes, spread, seed):
    rng = np.random.default_rng(seed)
    centers = rng.normal(0, 4.0, (n_classes, 4))
    X = np.vstack([rng.normal(c, spread, (40, 4)) for c in centers])
    return Dataset(X, np.repeat(np.arange(1, n_classes + 1), 40))


datasets = {"six_easy": blobs(6, 1.0, 1), "nine_hard": blobs(9, 2.0, 2)}
methods = ("ovo", "ddag", "ib_dtree", "ibge_dtree")
grid = HyperGrid(gammas=(0.5,), cs=(10.0,))

means = {m: [] for m in methods}
print(f"{'dataset':<11}{'method':<12}{'accuracy':>9}{'decisions':>11}")
for ds_name, ds in datasets.items():
    for method in methods:
        cell = run_cv(ds, method, grid, k=5, seed=0, dataset_name=ds_name)
        means[method].append(cell.mean_accuracy)
        print(f"{ds_name:<11}{method:<12}{cell.mean_accuracy:>9.4f}"
              f"{cell.mean_decisions:>11.2f}")

print("\npairwise (wins-losses-draws across datasets):")
for a, b in itertools.combinations(methods, 2):
    r = wilcoxon_signed_rank(means[a], means[b])
    p = "n/a" if r.p_value is None else f"{r.p_value:.4f}"
    print(f"  {a} vs {b}: {r.wins}-{r.losses}-{r.draws}, p = {p}")
