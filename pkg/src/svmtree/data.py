"""Dataset loading, [-1, 1] normalization and stratified fold assignment."""

import csv
import hashlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class DatasetError(ValueError):
    """Raised for malformed input files or invalid dataset operations."""


@dataclass(frozen=True)
class Dataset:
    """Labeled multi-class data with dense integer labels 1..n_classes.

    ``X`` holds one example per row; ``y`` holds the dense label of each row.
    ``original_labels[i - 1]`` is the raw label string that was mapped to
    dense id ``i``.  ``feature_min``/``feature_max`` are set once the data has
    been normalized (or normalized against another dataset's statistics).
    """

    X: np.ndarray
    y: np.ndarray
    original_labels: tuple = ()
    feature_min: Optional[np.ndarray] = None
    feature_max: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.X.ndim != 2:
            raise DatasetError("feature matrix must be 2-D")
        if len(self.y) != len(self.X):
            raise DatasetError("label / feature row count mismatch")

    @property
    def n_examples(self):
        return self.X.shape[0]

    @property
    def feature_dim(self):
        return self.X.shape[1]

    @property
    def class_ids(self):
        return tuple(range(1, int(self.y.max()) + 1)) if len(self.y) else ()

    @property
    def n_classes(self):
        return len(self.class_ids)

    @property
    def is_normalized(self):
        return self.feature_min is not None

    def subset(self, indices) -> "Dataset":
        """Row subset sharing labels and normalization metadata."""
        indices = np.asarray(indices)
        return Dataset(self.X[indices], self.y[indices], self.original_labels,
                       self.feature_min, self.feature_max)

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.X).tobytes())
        h.update(np.ascontiguousarray(self.y).tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class FoldPlan:
    """Stratified fold assignment for k-fold cross-validation."""

    k: int
    assignments: np.ndarray
    seed: int

    def train_indices(self, fold):
        return np.flatnonzero(self.assignments != fold)

    def test_indices(self, fold):
        return np.flatnonzero(self.assignments == fold)


def load_csv(path, label_column=-1, header=False) -> Dataset:
    """Load a comma-separated file into a :class:`Dataset`.

    Labels are remapped to dense integers 1..N in first-appearance order;
    the raw label strings are kept in ``original_labels`` for reporting.
    """
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        for row in reader:
            if row:
                rows.append(row)
    if header and rows:
        rows = rows[1:]
    if not rows:
        raise DatasetError(f"{path}: empty file")

    arity = len(rows[0])
    col = label_column if label_column >= 0 else arity + label_column
    if not 0 <= col < arity:
        raise DatasetError(f"{path}: label column {label_column} out of range")

    label_map = {}
    originals = []
    features = []
    labels = []
    for lineno, row in enumerate(rows, start=2 if header else 1):
        if len(row) != arity:
            raise DatasetError(f"{path}: row {lineno} has {len(row)} fields, expected {arity}")
        raw = row[col].strip()
        if raw not in label_map:
            label_map[raw] = len(label_map) + 1
            originals.append(raw)
        labels.append(label_map[raw])
        feats = row[:col] + row[col + 1:]
        try:
            features.append([float(v) for v in feats])
        except ValueError as e:
            raise DatasetError(f"{path}: row {lineno}: non-numeric feature ({e})") from None

    return Dataset(np.asarray(features, dtype=float),
                   np.asarray(labels, dtype=np.int64),
                   tuple(originals))


def normalize(ds: Dataset, stats=None) -> Dataset:
    """Affinely map each feature to [-1, 1].

    With ``stats=(min, max)`` the given per-feature statistics are applied
    instead (test folds reuse the train fold's statistics); values outside
    the recorded range are extrapolated, not clipped.  Constant features
    map to 0.
    """
    if stats is None:
        if ds.is_normalized:
            raise DatasetError("dataset already carries normalization statistics")
        lo = ds.X.min(axis=0)
        hi = ds.X.max(axis=0)
    else:
        lo, hi = np.asarray(stats[0], dtype=float), np.asarray(stats[1], dtype=float)

    span = hi - lo
    out = np.zeros_like(ds.X, dtype=float)
    keep = span > 0
    out[:, keep] = 2.0 * (ds.X[:, keep] - lo[keep]) / span[keep] - 1.0
    return Dataset(out, ds.y, ds.original_labels, lo, hi)


def make_folds(ds: Dataset, k: int, seed: int) -> FoldPlan:
    """Deterministic stratified fold assignment.

    Each class's examples are shuffled and dealt round-robin, so per-class
    fold counts never differ by more than one.  The dealing offset rotates
    per class to keep total fold sizes balanced.
    """
    if k < 2:
        raise DatasetError("need at least 2 folds")
    if k > ds.n_examples:
        raise DatasetError(f"k={k} exceeds {ds.n_examples} examples")

    rng = np.random.default_rng(seed)
    assignments = np.empty(ds.n_examples, dtype=np.int64)
    loads = np.zeros(k, dtype=np.int64)
    for cls in ds.class_ids:
        idx = np.flatnonzero(ds.y == cls)
        rng.shuffle(idx)
        # start dealing at the currently lightest fold (ties: lowest index)
        start = int(np.argmin(loads))
        for j, ex in enumerate(idx):
            fold = (start + j) % k
            assignments[ex] = fold
            loads[fold] += 1
    return FoldPlan(k, assignments, seed)
