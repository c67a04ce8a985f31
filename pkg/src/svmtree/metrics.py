"""Scores for candidate node classifiers: split entropy and the
margin/radius generalization-error bound."""

import math
from dataclasses import dataclass

import numpy as np

from .svm import BinaryModel, ModelStats, decision


@dataclass(frozen=True)
class SplitCounts:
    """Per-class example counts on each side of a classifier's hyperplane.

    ``classes[i]`` owns the counts ``pos[i]`` / ``neg[i]``.
    """

    classes: tuple
    pos: tuple
    neg: tuple

    @property
    def total(self):
        return sum(self.pos) + sum(self.neg)


@dataclass(frozen=True)
class GenErrorParams:
    c_const: float = 0.1
    delta: float = 0.01

    def __post_init__(self):
        if not self.c_const > 0:
            raise ValueError("c_const must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")


def split_counts(h: BinaryModel, class_examples: dict) -> SplitCounts:
    """Count, per class, how many examples fall on each side of ``h``.

    ``class_examples`` maps class id -> example matrix.  A decision value of
    exactly 0 counts as the positive side.
    """
    classes = tuple(sorted(class_examples))
    pos, neg = [], []
    for cls in classes:
        X = class_examples[cls]
        if len(X) == 0:
            pos.append(0)
            neg.append(0)
            continue
        d = np.atleast_1d(decision(h, X))
        p = int(np.sum(d >= 0))
        pos.append(p)
        neg.append(len(X) - p)
    return SplitCounts(classes, tuple(pos), tuple(neg))


def split_counts_from_signs(classes, labels, positive_mask) -> SplitCounts:
    """Build SplitCounts from precomputed decision signs.

    Used by tree builders that cache each pooled classifier's decision signs
    over the whole training set.
    """
    classes = tuple(sorted(classes))
    pos, neg = [], []
    for cls in classes:
        mask = labels == cls
        p = int(np.sum(positive_mask & mask))
        pos.append(p)
        neg.append(int(np.sum(mask)) - p)
    return SplitCounts(classes, tuple(pos), tuple(neg))


def entropy(counts: SplitCounts) -> float:
    """Weighted class entropy of the two sides of a split, in bits.

    Zero-count terms contribute 0; an empty side contributes 0 as a whole.
    """
    total = counts.total
    if total == 0:
        raise ValueError("entropy undefined for zero examples")
    result = 0.0
    for side in (counts.pos, counts.neg):
        side_total = sum(side)
        if side_total == 0:
            continue
        inner = 0.0
        for c in side:
            if c > 0:
                p = c / side_total
                inner -= p * math.log2(p)
        result += (side_total / total) * inner
    return result


def generalization_error_bound(stats: ModelStats,
                               params: GenErrorParams = GenErrorParams()) -> float:
    """Upper bound on expected risk: empirical term l/m plus a capacity term
    in the radius/margin ratio.  Natural logs; +inf for degenerate models."""
    if stats.m <= 0:
        raise ValueError("bound undefined for empty training set")
    if stats.degenerate or not stats.margin_delta > 0:
        return math.inf
    log_m = math.log(stats.m)
    ratio_sq = (stats.radius / stats.margin_delta) ** 2
    cap = (params.c_const / stats.m) * (ratio_sq * log_m ** 2
                                        + math.log(1.0 / params.delta))
    return stats.l / stats.m + math.sqrt(cap)
