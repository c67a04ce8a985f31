"""Reference multi-class reductions: OVO Max-Wins, OVA, DDAG and ADAG."""

from dataclasses import dataclass

import numpy as np

from .svm import BinaryModel, TrainConfig, decision, train


@dataclass(frozen=True)
class OvoPool:
    """One classifier per class pair (i, j), i < j, with class i positive."""

    classifiers: dict  # (i, j) -> BinaryModel
    classes: tuple

    @property
    def n_classes(self):
        return len(self.classes)


@dataclass(frozen=True)
class OvaPool:
    """One classifier per class, that class positive versus the rest."""

    classifiers: dict  # i -> BinaryModel
    classes: tuple

    @property
    def n_classes(self):
        return len(self.classes)


def train_ovo_pool(X, y, cfg: TrainConfig, gram=None) -> OvoPool:
    """Train all N(N-1)/2 pairwise classifiers.

    ``gram`` is an optional precomputed kernel matrix over all of ``X``;
    pair trainings slice it instead of recomputing kernels.
    """
    classes = tuple(sorted(int(c) for c in np.unique(y)))
    idx = {c: np.flatnonzero(y == c) for c in classes}
    classifiers = {}
    for a, i in enumerate(classes):
        for j in classes[a + 1:]:
            rows = np.concatenate([idx[i], idx[j]])
            sub = gram[np.ix_(rows, rows)] if gram is not None else None
            classifiers[(i, j)] = train(X[idx[i]], X[idx[j]], cfg, gram=sub)
    return OvoPool(classifiers, classes)


def train_ova_pool(X, y, cfg: TrainConfig, gram=None) -> OvaPool:
    """Train one classifier per class against all remaining classes."""
    classes = tuple(sorted(int(c) for c in np.unique(y)))
    classifiers = {}
    for c in classes:
        pos_rows = np.flatnonzero(y == c)
        neg_rows = np.flatnonzero(y != c)
        rows = np.concatenate([pos_rows, neg_rows])
        sub = gram[np.ix_(rows, rows)] if gram is not None else None
        classifiers[c] = train(X[pos_rows], X[neg_rows], cfg, gram=sub)
    return OvaPool(classifiers, classes)


def ovo_decision_table(pool: OvoPool, X):
    """Decision values of every pairwise classifier on every row of ``X``.

    Returns {(i, j): value array}; lets DDAG/ADAG order averaging re-use one
    set of kernel evaluations across many permutations.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return {pair: np.atleast_1d(decision(m, X))
            for pair, m in pool.classifiers.items()}


def _pair_winner(table, i, j, row):
    """Winning class of the (min, max) pairwise test for one example."""
    a, b = (i, j) if i < j else (j, i)
    return a if table[(a, b)][row] >= 0 else b


def classify_ovo_maxwins(pool: OvoPool, x):
    """Max-Wins vote over all pairs; ties go to the lowest class id."""
    table = ovo_decision_table(pool, x)
    votes = {c: 0 for c in pool.classes}
    for (i, j) in table:
        votes[_pair_winner(table, i, j, 0)] += 1
    best = max(pool.classes, key=lambda c: (votes[c], -c))
    return best, len(table)


def classify_ova(pool: OvaPool, x):
    """Highest decision score wins; ties go to the lowest class id."""
    scores = {c: decision(m, np.asarray(x, dtype=float))
              for c, m in pool.classifiers.items()}
    best = max(pool.classes, key=lambda c: (scores[c], -c))
    return best, len(pool.classifiers)


def classify_ddag(pool: OvoPool, order, x):
    """List elimination: test (first, last), drop the loser, repeat."""
    table = ovo_decision_table(pool, x)
    return _ddag_from_table(table, order, 0)


def classify_adag(pool: OvoPool, order, x):
    """Adaptive tournament: winners of each round pair up in the next."""
    table = ovo_decision_table(pool, x)
    return _adag_from_table(table, order, 0)


def _ddag_from_table(table, order, row):
    remaining = list(order)
    n = len(remaining)
    while len(remaining) > 1:
        i, j = remaining[0], remaining[-1]
        if _pair_winner(table, i, j, row) == i:
            remaining.pop()
        else:
            remaining.pop(0)
    return remaining[0], n - 1


def _adag_from_table(table, order, row):
    remaining = list(order)
    n = len(remaining)
    while len(remaining) > 1:
        nxt = []
        for k in range(0, len(remaining) - 1, 2):
            nxt.append(_pair_winner(table, remaining[k], remaining[k + 1], row))
        if len(remaining) % 2:
            nxt.append(remaining[-1])  # odd class gets the bye
        remaining = nxt
    return remaining[0], n - 1
