import json

import numpy as np
import pytest

from svmtree.svm import BinaryModel, KernelSpec, TrainConfig, train
from svmtree.trees import (TreeBuildError, TreeNode, build_bts_g, build_cbts_g,
                           build_ib_dtree, build_ibge_dtree,
                           centroid_pair_order, classify_tree,
                           considered_candidates, group_by_majority,
                           tree_from_dict, tree_to_dict)

from conftest import make_blobs


def stub(bias):
    return BinaryModel(np.zeros((0, 0)), np.zeros(0), float(bias),
                       KernelSpec("linear"))


def check_tree_invariants(root, classes):
    """N leaves, N-1 internal nodes, every class in exactly one leaf,
    children partition each node's candidate set."""
    leaves = root.leaf_classes()
    assert sorted(leaves) == sorted(classes)
    assert len(set(leaves)) == len(leaves)
    assert root.internal_count() == len(classes) - 1

    def walk(node, candidates):
        if node.is_leaf:
            assert candidates == {node.class_id}
            return
        P, N = set(node.pos_classes), set(node.neg_classes)
        assert P and N and not (P & N)
        assert P | N == candidates
        assert set(node.left.leaf_classes()) == P
        assert set(node.right.leaf_classes()) == N
        walk(node.left, P)
        walk(node.right, N)

    walk(root, set(classes))


class TestGroupByMajority:
    def test_third_class_majority_negative(self, linear_cfg):
        # a 1-vs-2 separator leaves class 3 mostly on the negative side
        rng = np.random.default_rng(0)
        data = {1: rng.normal(3, 0.3, (20, 1)),
                2: rng.normal(-3, 0.3, (20, 1)),
                3: rng.normal(-5, 0.5, (20, 1))}
        h = train(data[1], data[2], linear_cfg)
        g = group_by_majority(h, data, linear_cfg)
        assert g.pos_classes == (1,)
        assert g.neg_classes == (2, 3)
        # the retrained classifier separates the two groups
        assert np.all(g.final_classifier.decision(data[1]) > 0)
        assert np.all(g.final_classifier.decision(np.vstack([data[2], data[3]])) < 0)

    def test_six_class_root_grouping(self, linear_cfg):
        # 2-vs-1 separator: classes 3, 5 fall positive; 4, 6 fall negative
        rng = np.random.default_rng(1)
        data = {1: rng.normal(-3, 0.2, (15, 1)), 2: rng.normal(3, 0.2, (15, 1)),
                3: rng.normal(5, 0.3, (15, 1)), 4: rng.normal(-5, 0.3, (15, 1)),
                5: rng.normal(2, 0.3, (15, 1)), 6: rng.normal(-2, 0.3, (15, 1))}
        h = train(data[2], data[1], linear_cfg)
        g = group_by_majority(h, data, linear_cfg)
        assert g.pos_classes == (2, 3, 5)
        assert g.neg_classes == (1, 4, 6)

    def test_exact_tie_goes_negative(self, linear_cfg):
        data = {1: np.array([[2.0]]), 2: np.array([[-2.0]]),
                3: np.array([[1.0], [-1.0]])}
        h = train(data[1], data[2], linear_cfg)
        g = group_by_majority(h, data, linear_cfg)
        assert 3 in g.neg_classes

    def test_empty_side_fallback_forces_pair_apart(self, linear_cfg):
        data = {1: np.array([[2.0]]), 2: np.array([[-2.0]]),
                3: np.array([[1.0]])}
        g = group_by_majority(stub(1.0), data, linear_cfg, pair=(1, 2))
        assert 1 in g.pos_classes and 2 in g.neg_classes

    def test_empty_side_without_pair_fails(self, linear_cfg):
        data = {1: np.array([[2.0]]), 2: np.array([[-2.0]])}
        with pytest.raises(TreeBuildError):
            group_by_majority(stub(1.0), data, linear_cfg)

    def test_majority_rule_on_counts(self, linear_cfg):
        # each class's chosen side holds at least half its examples under h
        rng = np.random.default_rng(2)
        data = {c: rng.normal(rng.uniform(-4, 4), 1.5, (21, 2))
                for c in range(1, 6)}
        h = train(data[1], data[2], TrainConfig(c_reg=1.0,
                                                kernel=KernelSpec("rbf", 0.3)))
        g = group_by_majority(h, data, linear_cfg, pair=(1, 2))
        for c, X in data.items():
            on_pos = int(np.sum(np.atleast_1d(h.decision(X)) >= 0))
            if c in g.pos_classes:
                assert on_pos >= len(X) - on_pos or c == 1
            else:
                assert len(X) - on_pos >= on_pos or c == 2


class TestIbDtree:
    def test_two_class_base_case(self, rbf_cfg):
        ds = make_blobs([(0, 0), (5, 5)], 10, 0.4, seed=3)
        t = build_ib_dtree(ds, rbf_cfg)
        assert not t.is_leaf
        assert t.left.is_leaf and t.right.is_leaf
        check_tree_invariants(t, [1, 2])

    def test_structural_invariants(self, six_class_ds, rbf_cfg):
        t = build_ib_dtree(six_class_ds, rbf_cfg)
        check_tree_invariants(t, range(1, 7))

    def test_perfect_training_accuracy_on_separated_blobs(self, six_class_ds,
                                                          rbf_cfg):
        t = build_ib_dtree(six_class_ds, rbf_cfg)
        preds = [classify_tree(t, x)[0] for x in six_class_ds.X]
        assert np.mean(np.array(preds) == six_class_ds.y) > 0.99

    def test_rebuild_is_identical(self, six_class_ds, rbf_cfg):
        a = tree_to_dict(build_ib_dtree(six_class_ds, rbf_cfg))
        b = tree_to_dict(build_ib_dtree(six_class_ds, rbf_cfg))
        assert a == b


class TestIbgeDtree:
    def test_candidate_shortlist_sizes(self):
        assert considered_candidates(10, 0.2) == 9
        assert considered_candidates(2, 0.2) == 1
        assert considered_candidates(3, 0.5) == 2  # 1.5 rounds half-up
        assert considered_candidates(100, 0.2) == 990

    def test_structural_invariants(self, six_class_ds, rbf_cfg):
        t = build_ibge_dtree(six_class_ds, rbf_cfg)
        check_tree_invariants(t, range(1, 7))

    def test_frac_one_considers_all(self, rbf_cfg):
        ds = make_blobs([(0, 0), (6, 0), (0, 6), (6, 6)], 12, 0.4, seed=5)
        t = build_ibge_dtree(ds, rbf_cfg, frac=1.0)
        check_tree_invariants(t, range(1, 5))

    def test_invalid_frac(self, six_class_ds, rbf_cfg):
        with pytest.raises(ValueError):
            build_ibge_dtree(six_class_ds, rbf_cfg, frac=0.0)


class TestBtsG:
    def test_seeded_determinism(self, six_class_ds, rbf_cfg):
        a = tree_to_dict(build_bts_g(six_class_ds, rbf_cfg, seed=9))
        b = tree_to_dict(build_bts_g(six_class_ds, rbf_cfg, seed=9))
        assert a == b

    def test_different_seeds_may_differ_but_stay_valid(self, six_class_ds,
                                                       rbf_cfg):
        for seed in range(4):
            t = build_bts_g(six_class_ds, rbf_cfg, seed=seed)
            check_tree_invariants(t, range(1, 7))

    def test_two_class_structure(self, rbf_cfg):
        ds = make_blobs([(0, 0), (5, 5)], 10, 0.4, seed=6)
        t = build_bts_g(ds, rbf_cfg, seed=0)
        assert t.left.is_leaf and t.right.is_leaf


class TestCbtsG:
    def test_collinear_centroid_pair_order(self):
        # class centroids at distance 1, 2, 3 from the global centroid
        X = np.array([[1.0], [2.0], [4.0], [-7.0 / 3]])
        # centroids: global at 0 requires constructed points below
        X = np.array([[1.0], [-2.0], [3.0], [-2.0]])
        y = np.array([1, 2, 3, 2])
        order = centroid_pair_order(X, y, [1, 2, 3])
        assert order[0] == (1, 2)

    def test_tie_breaks_by_class_id(self):
        X = np.array([[1.0], [-1.0], [2.0], [-2.0]])
        y = np.array([1, 2, 3, 4])
        order = centroid_pair_order(X, y, [1, 2, 3, 4])
        assert order[0] == (1, 2)

    def test_structural_invariants(self, six_class_ds, rbf_cfg):
        t = build_cbts_g(six_class_ds, rbf_cfg)
        check_tree_invariants(t, range(1, 7))


class TestClassifyTree:
    def test_depth_one(self):
        t = TreeNode(classifier=stub(1.0), pos_classes=(1,), neg_classes=(2,),
                     left=TreeNode(class_id=1), right=TreeNode(class_id=2))
        assert classify_tree(t, np.zeros(2)) == (1, 1)

    def test_balanced_eight_leaves_always_three_decisions(self):
        def subtree(classes):
            if len(classes) == 1:
                return TreeNode(class_id=classes[0])
            half = len(classes) // 2
            return TreeNode(classifier=stub(1.0 if classes[0] % 2 else -1.0),
                            pos_classes=tuple(classes[:half]),
                            neg_classes=tuple(classes[half:]),
                            left=subtree(classes[:half]),
                            right=subtree(classes[half:]))
        t = subtree(list(range(1, 9)))
        for _ in range(5):
            _, dec = classify_tree(t, np.zeros(3))
            assert dec == 3

    def test_decisions_bounded_by_n_minus_one(self, six_class_ds, rbf_cfg):
        t = build_ib_dtree(six_class_ds, rbf_cfg)
        for x in six_class_ds.X[::7]:
            _, dec = classify_tree(t, x)
            assert 1 <= dec <= 5


class TestSerialization:
    def test_round_trip(self, six_class_ds, rbf_cfg):
        t = build_ib_dtree(six_class_ds, rbf_cfg)
        d = json.loads(json.dumps(tree_to_dict(t)))
        t2 = tree_from_dict(d)
        assert tree_to_dict(t2) == tree_to_dict(t)
        for x in six_class_ds.X[::9]:
            assert classify_tree(t, x) == classify_tree(t2, x)
