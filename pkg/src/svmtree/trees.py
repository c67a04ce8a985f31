"""Decision-tree multi-class models built on class-grouping-by-majority:
entropy-driven, bound-driven, random and centroid-based node selection."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import Dataset
from .metrics import GenErrorParams, entropy, generalization_error_bound, \
    split_counts_from_signs
from .svm import BinaryModel, TrainConfig, decision, model_from_dict, \
    model_to_dict, train


class TreeBuildError(RuntimeError):
    """Raised when no usable node classifier can be constructed."""


def _entropy_from_counts(pos, neg):
    """Vectorized twin of metrics.entropy over per-class count arrays."""
    total = int(pos.sum() + neg.sum())
    result = 0.0
    for side in (pos, neg):
        st = int(side.sum())
        if st == 0:
            continue
        p = side[side > 0] / st
        result += (st / total) * float(-(p * np.log2(p)).sum())
    return result


@dataclass(frozen=True)
class TreeNode:
    """Leaf (``class_id`` set) or internal node (everything else set).

    ``left`` is the positive side and holds the classes in ``pos_classes``.
    """

    class_id: Optional[int] = None
    classifier: Optional[BinaryModel] = None
    pos_classes: tuple = ()
    neg_classes: tuple = ()
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    @property
    def is_leaf(self):
        return self.class_id is not None

    def leaf_classes(self):
        if self.is_leaf:
            return [self.class_id]
        return self.left.leaf_classes() + self.right.leaf_classes()

    def internal_count(self):
        if self.is_leaf:
            return 0
        return 1 + self.left.internal_count() + self.right.internal_count()


@dataclass(frozen=True)
class GroupingResult:
    final_classifier: BinaryModel
    pos_classes: tuple
    neg_classes: tuple


def group_by_majority(h: BinaryModel, class_examples: dict, cfg: TrainConfig,
                      pair=None) -> GroupingResult:
    """Assign each class wholly to the side of ``h`` holding the majority of
    its examples (ties to the negative side), then retrain.

    If majority voting empties one side, the generating ``pair`` (i, j) is
    forced apart (i positive, j negative) and the majority rule re-applied to
    the remaining classes only; without a pair to fall back on the degenerate
    case is an error.
    """
    classes = sorted(class_examples)
    if len(classes) < 2:
        raise ValueError("need at least two candidate classes")
    signs = {c: np.atleast_1d(decision(h, class_examples[c])) >= 0
             for c in classes}
    P, N = _majority_sides(classes, signs, forced=None)
    if not P or not N:
        if pair is None:
            raise TreeBuildError("majority voting left one side empty")
        P, N = _majority_sides(classes, signs, forced=pair)

    pos_X = np.vstack([class_examples[c] for c in P])
    neg_X = np.vstack([class_examples[c] for c in N])
    h_final = train(pos_X, neg_X, cfg)
    return GroupingResult(h_final, tuple(P), tuple(N))


def _majority_sides(classes, signs, forced):
    P, N = [], []
    for c in classes:
        if forced is not None and c == forced[0]:
            P.append(c)
        elif forced is not None and c == forced[1]:
            N.append(c)
        else:
            p = int(np.sum(signs[c]))
            n = len(signs[c]) - p
            (P if p > n else N).append(c)
    return P, N


def classify_tree(root: TreeNode, x):
    """Walk the tree; returns (class id, number of classifiers evaluated)."""
    node = root
    steps = 0
    while not node.is_leaf:
        steps += 1
        node = node.left if decision(node.classifier, x) >= 0 else node.right
    return node.class_id, steps


def considered_candidates(n_classes, frac):
    """Shortlist size for bound-based selection: round-half-up of
    frac * n_pairs, floored at 1 (10 classes, frac 0.2 -> 9)."""
    pairs = n_classes * (n_classes - 1) // 2
    return max(1, int(math.floor(frac * pairs + 0.5)))


class _Builder:
    """Shared machinery: one Gram matrix per dataset, pooled pairwise
    classifiers trained once, and cached decision signs over all examples."""

    def __init__(self, ds: Dataset, cfg: TrainConfig, pool=None, gram=None):
        self.X = ds.X
        self.y = ds.y
        self.cfg = cfg
        self.classes = [int(c) for c in np.unique(ds.y)]
        if len(self.classes) < 2:
            raise TreeBuildError("need at least two classes")
        self.rows = {c: np.flatnonzero(ds.y == c) for c in self.classes}
        if gram is not None:
            self.gram = gram
        elif len(ds.X) <= 4000:
            self.gram = cfg.kernel.matrix(ds.X)
        else:
            self.gram = None
        self.pool = pool
        self._pair_models = {} if pool is None else dict(pool.classifiers)
        self._sign_cache = {}

    def pair_model(self, i, j):
        if (i, j) not in self._pair_models:
            rows = np.concatenate([self.rows[i], self.rows[j]])
            sub = self.gram[np.ix_(rows, rows)] if self.gram is not None else None
            self._pair_models[(i, j)] = train(self.X[self.rows[i]],
                                              self.X[self.rows[j]],
                                              self.cfg, gram=sub)
        return self._pair_models[(i, j)]

    def pair_signs(self, i, j):
        """Positive-side mask of the (i, j) pooled classifier over all X."""
        if (i, j) not in self._sign_cache:
            model = self.pair_model(i, j)
            self._sign_cache[(i, j)] = np.atleast_1d(decision(model, self.X)) >= 0
        return self._sign_cache[(i, j)]

    def node_rows(self, K):
        return np.concatenate([self.rows[c] for c in K])

    def entropy_of_pair(self, i, j, K):
        rows = self.node_rows(K)
        signs = self.pair_signs(i, j)[rows]
        counts = split_counts_from_signs(K, self.y[rows], signs)
        return entropy(counts)

    def ranked_pairs(self, K):
        """All pairs within K sorted by (entropy, i, j)."""
        rows = self.node_rows(K)
        labels = self.y[rows]
        nbins = max(K) + 1
        scored = []
        for a, i in enumerate(K):
            for j in K[a + 1:]:
                signs = self.pair_signs(i, j)[rows]
                pos = np.bincount(labels[signs], minlength=nbins)[K]
                neg = np.bincount(labels[~signs], minlength=nbins)[K]
                scored.append((_entropy_from_counts(pos, neg), i, j))
        scored.sort()
        return [(i, j) for _, i, j in scored]

    def grouping_for(self, pair, K):
        """Majority grouping of K under the pooled ``pair`` classifier,
        with the empty-side fallback; h' trained on the Gram slice."""
        signs_all = self.pair_signs(*pair)
        signs = {c: signs_all[self.rows[c]] for c in K}
        P, N = _majority_sides(sorted(K), signs, forced=None)
        if not P or not N:
            P, N = _majority_sides(sorted(K), signs, forced=pair)
        if not P or not N:
            raise TreeBuildError(f"grouping failed for pair {pair}")

        pos_rows = np.concatenate([self.rows[c] for c in P])
        neg_rows = np.concatenate([self.rows[c] for c in N])
        rows = np.concatenate([pos_rows, neg_rows])
        sub = self.gram[np.ix_(rows, rows)] if self.gram is not None else None
        h_final = train(self.X[pos_rows], self.X[neg_rows], self.cfg, gram=sub)
        return GroupingResult(h_final, tuple(P), tuple(N))

    def build(self, K, choose):
        """Recursive construction; ``choose(K)`` returns the GroupingResult
        to install at the node over candidate classes K."""
        if len(K) == 1:
            return TreeNode(class_id=K[0])
        g = choose(K)
        left = self.build(sorted(g.pos_classes), choose)
        right = self.build(sorted(g.neg_classes), choose)
        return TreeNode(classifier=g.final_classifier,
                        pos_classes=g.pos_classes, neg_classes=g.neg_classes,
                        left=left, right=right)


def build_ib_dtree(ds: Dataset, cfg: TrainConfig, pool=None, gram=None) -> TreeNode:
    """Entropy-driven tree: each node starts from the minimum-entropy
    pairwise classifier, then regroups by majority."""
    b = _Builder(ds, cfg, pool, gram)

    def choose(K):
        for pair in b.ranked_pairs(K):
            try:
                return b.grouping_for(pair, K)
            except TreeBuildError:
                continue
        raise TreeBuildError(f"no viable node classifier over classes {K}")

    return b.build(b.classes, choose)


def build_ibge_dtree(ds: Dataset, cfg: TrainConfig, frac=0.2, pool=None,
                     gram=None,
                     gen_params: GenErrorParams = GenErrorParams()) -> TreeNode:
    """Like the entropy-driven tree, but shortlists the lowest-entropy pairs
    and installs the regrouped classifier with the smallest
    generalization-error bound."""
    if not 0 < frac <= 1:
        raise ValueError("frac must lie in (0, 1]")
    b = _Builder(ds, cfg, pool, gram)

    def choose(K):
        ranked = b.ranked_pairs(K)
        n = considered_candidates(len(K), frac)
        best = None
        for pair in ranked[:n]:
            try:
                g = b.grouping_for(pair, K)
            except TreeBuildError:
                continue
            bound = generalization_error_bound(g.final_classifier.stats, gen_params)
            if best is None or bound < best[0]:
                best = (bound, g)
        if best is None:
            # shortlist exhausted; fall back to the remaining ranking
            for pair in ranked[n:]:
                try:
                    return b.grouping_for(pair, K)
                except TreeBuildError:
                    continue
            raise TreeBuildError(f"no viable node classifier over classes {K}")
        return best[1]

    return b.build(b.classes, choose)


def build_bts_g(ds: Dataset, cfg: TrainConfig, seed: int, pool=None,
                gram=None) -> TreeNode:
    """Random initial pair at each node, then grouping-by-majority; no class
    is ever duplicated across leaves."""
    b = _Builder(ds, cfg, pool, gram)
    rng = np.random.default_rng(seed)

    def choose(K):
        pairs = [(i, j) for a, i in enumerate(K) for j in K[a + 1:]]
        order = rng.permutation(len(pairs))
        for idx in order:
            try:
                return b.grouping_for(pairs[idx], K)
            except TreeBuildError:
                continue
        raise TreeBuildError(f"no viable node classifier over classes {K}")

    return b.build(b.classes, choose)


def centroid_pair_order(X, y, classes):
    """Class pairs ordered by their centroids' nearness to the centroid of
    all examples of ``classes``; ties break by class id.  The first entry is
    the initial pair the centroid-based tree uses."""
    rows = np.concatenate([np.flatnonzero(y == c) for c in classes])
    center = X[rows].mean(axis=0)
    dist = sorted((float(np.linalg.norm(X[y == c].mean(axis=0) - center)), c)
                  for c in classes)
    return [(min(a, b), max(a, b))
            for idx, (_, a) in enumerate(dist)
            for _, b in dist[idx + 1:]]


def build_cbts_g(ds: Dataset, cfg: TrainConfig, pool=None, gram=None) -> TreeNode:
    """Initial pair = the two classes whose centroids lie nearest the
    all-data centroid (input space), then grouping-by-majority."""
    b = _Builder(ds, cfg, pool, gram)

    def choose(K):
        for pair in centroid_pair_order(b.X, b.y, K):
            try:
                return b.grouping_for(pair, K)
            except TreeBuildError:
                continue
        raise TreeBuildError(f"no viable node classifier over classes {K}")

    return b.build(b.classes, choose)


# --- serialization ---------------------------------------------------------

def tree_to_dict(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"leaf": node.class_id}
    return {
        "classifier": model_to_dict(node.classifier),
        "pos_classes": list(node.pos_classes),
        "neg_classes": list(node.neg_classes),
        "left": tree_to_dict(node.left),
        "right": tree_to_dict(node.right),
    }


def tree_from_dict(d: dict) -> TreeNode:
    if "leaf" in d:
        return TreeNode(class_id=d["leaf"])
    return TreeNode(classifier=model_from_dict(d["classifier"]),
                    pos_classes=tuple(d["pos_classes"]),
                    neg_classes=tuple(d["neg_classes"]),
                    left=tree_from_dict(d["left"]),
                    right=tree_from_dict(d["right"]))
