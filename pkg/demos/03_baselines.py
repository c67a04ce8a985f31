"""Compare the classical reduction baselines on one dataset.

One-vs-one Max-Wins evaluates every pairwise classifier; one-vs-all
evaluates one classifier per class; DDAG and ADAG reuse the one-vs-one
pool but eliminate classes along a path, needing only N-1 decisions.
"""

import numpy as np

from svmtree.baselines import (classify_adag, classify_ddag, classify_ova,
                               classify_ovo_maxwins, train_ova_pool,
                               train_ovo_pool)
from svmtree.data import Dataset
from svmtree.svm import KernelSpec, TrainConfig

rng = np.random.default_rng(3)
n_classes = 8
centers = rng.uniform(-8, 8, (n_classes, 3))
X = np.vstack([rng.normal(c, 1.2, (40, 3)) for c in centers])
y = np.repeat(np.arange(1, n_classes + 1), 40)
ds = Dataset(X, y)

cfg = TrainConfig(c_reg=10.0, kernel=KernelSpec("rbf", 0.2))
ovo = train_ovo_pool(ds.X, ds.y, cfg)
ova = train_ova_pool(ds.X, ds.y, cfg)
order = list(ds.class_ids)

methods = {
    "ovo max-wins": lambda x: classify_ovo_maxwins(ovo, x),
    "ova": lambda x: classify_ova(ova, x),
    "ddag": lambda x: classify_ddag(ovo, order, x),
    "adag": lambda x: classify_adag(ovo, order, x),
}

print(f"{'method':<14}{'decisions':>10}{'train acc':>11}")
for name, clf in methods.items():
    results = [clf(x) for x in ds.X]
    preds = np.array([r[0] for r in results])
    decs = {r[1] for r in results}
    acc = np.mean(preds == ds.y)
    print(f"{name:<14}{'/'.join(str(d) for d in sorted(decs)):>10}{acc:>11.3f}")
