"""Train a single soft-margin SVM and inspect the quantities that drive
model selection elsewhere in the library.

The solver works on the dual problem, so everything we care about --
margin, support vectors, the generalization-error bound -- comes straight
out of the returned model's ``stats``.
"""

import numpy as np

from svmtree.metrics import GenErrorParams, generalization_error_bound
from svmtree.svm import KernelSpec, TrainConfig, decision, train

rng = np.random.default_rng(0)
pos = rng.normal([1.5, 1.5], 1.0, (80, 2))
neg = rng.normal([-1.5, -1.5], 1.0, (80, 2))

cfg = TrainConfig(c_reg=10.0, kernel=KernelSpec("rbf", gamma=0.5))
model = train(pos, neg, cfg)

print(f"support vectors : {len(model.support_vectors)} of {model.stats.m}")
print(f"margin (1/||w||): {model.stats.margin_delta:.4f}")
print(f"data radius R   : {model.stats.radius:.4f}  (<= sqrt(2) for RBF)")
print(f"margin errors l : {model.stats.l}")
print(f"dual objective  : {model.stats.dual_objective:.4f}")

bound = generalization_error_bound(model.stats, GenErrorParams())
print(f"gen-error bound : {bound:.4f}")

# the decision function is positive on the positive class's side
scores = decision(model, np.vstack([pos, neg]))
acc = np.mean((scores >= 0) == np.r_[np.ones(80), np.zeros(80)].astype(bool))
print(f"training acc    : {acc:.3f}")
