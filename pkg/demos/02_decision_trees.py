"""Build the four multi-class decision trees on one dataset and compare
how many binary decisions each needs per classification.

All four share the same node recipe -- pick an initial class pair, group
the remaining classes to whichever side of that pair's classifier holds
the majority of their examples, retrain on the two groups -- and differ
only in how the initial pair is chosen:

  ib_dtree    lowest split entropy among all pairs
  ibge_dtree  entropy shortlist, then smallest generalization-error bound
  bts_g       a random pair (seeded)
  cbts_g      the two classes nearest the data centroid
"""

import numpy as np

from svmtree.data import Dataset
from svmtree.svm import KernelSpec, TrainConfig
from svmtree.trees import (build_bts_g, build_cbts_g, build_ib_dtree,
                           build_ibge_dtree, classify_tree)

rng = np.random.default_rng(7)
n_classes, per_class = 12, 25
centers = rng.uniform(-10, 10, (n_classes, 2))
X = np.vstack([rng.normal(c, 0.6, (per_class, 2)) for c in centers])
y = np.repeat(np.arange(1, n_classes + 1), per_class)
ds = Dataset(X, y)

cfg = TrainConfig(c_reg=10.0, kernel=KernelSpec("rbf", 0.3))

builders = {
    "ib_dtree": lambda: build_ib_dtree(ds, cfg),
    "ibge_dtree": lambda: build_ibge_dtree(ds, cfg, frac=0.2),
    "bts_g": lambda: build_bts_g(ds, cfg, seed=0),
    "cbts_g": lambda: build_cbts_g(ds, cfg),
}

print(f"{n_classes} classes: one-vs-one needs "
      f"{n_classes * (n_classes - 1) // 2} decisions, a balanced tree "
      f"about {int(np.ceil(np.log2(n_classes)))}")
print()
print(f"{'method':<12}{'internal nodes':>15}{'mean decisions':>16}{'train acc':>11}")
for name, make in builders.items():
    tree = make()
    results = [classify_tree(tree, x) for x in ds.X]
    preds = np.array([r[0] for r in results])
    mean_dec = np.mean([r[1] for r in results])
    acc = np.mean(preds == ds.y)
    print(f"{name:<12}{tree.internal_count():>15}{mean_dec:>16.2f}{acc:>11.3f}")
