import numpy as np
import pytest

from svmtree.data import Dataset
from svmtree.svm import KernelSpec, TrainConfig


def make_blobs(centers, per_class, spread, seed=0, labels=None):
    """Gaussian blob dataset; class ids 1..len(centers) unless given."""
    rng = np.random.default_rng(seed)
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    X = np.vstack([rng.normal(c, spread, (per_class, centers.shape[1]))
                   for c in centers])
    if labels is None:
        labels = range(1, len(centers) + 1)
    y = np.repeat(np.fromiter(labels, dtype=np.int64), per_class)
    return Dataset(X, y)


@pytest.fixture
def rbf_cfg():
    return TrainConfig(c_reg=10.0, kernel=KernelSpec("rbf", 0.5))


@pytest.fixture
def linear_cfg():
    return TrainConfig(c_reg=10.0, kernel=KernelSpec("linear"))


@pytest.fixture
def six_class_ds():
    centers = [(0, 0), (8, 0), (0, 8), (8, 8), (16, 0), (16, 8)]
    return make_blobs(centers, 20, 0.5, seed=42)
