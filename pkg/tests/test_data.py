import numpy as np
import pytest

from svmtree.data import Dataset, DatasetError, load_csv, make_folds, normalize

from conftest import make_blobs


def write_csv(tmp_path, rows, name="data.csv"):
    p = tmp_path / name
    p.write_text("\n".join(",".join(str(v) for v in r) for r in rows) + "\n")
    return p


class TestLoadCsv:
    def test_dense_relabeling_first_appearance(self, tmp_path):
        p = write_csv(tmp_path, [[1.0, 2.0, "a"], [3.0, 4.0, "b"], [5.0, 6.0, "a"]])
        ds = load_csv(p)
        assert ds.class_ids == (1, 2)
        assert list(ds.y) == [1, 2, 1]
        assert ds.original_labels == ("a", "b")

    def test_arity_mismatch_reports_row(self, tmp_path):
        p = write_csv(tmp_path, [[1.0, 2.0], [1.0]])
        with pytest.raises(DatasetError, match="row 2"):
            load_csv(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        with pytest.raises(DatasetError, match="empty"):
            load_csv(p)

    def test_non_numeric_feature(self, tmp_path):
        p = write_csv(tmp_path, [[1.0, "x", "a"]])
        with pytest.raises(DatasetError, match="non-numeric"):
            load_csv(p)

    def test_header_and_label_column(self, tmp_path):
        p = write_csv(tmp_path, [["lbl", "f1", "f2"], ["a", 1.0, 2.0]])
        ds = load_csv(p, label_column=0, header=True)
        assert ds.feature_dim == 2
        assert ds.X[0].tolist() == [1.0, 2.0]

    def test_page_block_shape(self, tmp_path):
        # same row/feature/class cardinality as the largest 5-class benchmark set
        rng = np.random.default_rng(0)
        rows = [[*rng.normal(size=10).round(4), (i % 5) + 1] for i in range(5473)]
        ds = load_csv(write_csv(tmp_path, rows))
        assert ds.n_examples == 5473
        assert ds.feature_dim == 10
        assert ds.n_classes == 5


class TestNormalize:
    def test_affine_endpoints(self):
        ds = Dataset(np.array([[0.0], [5.0], [10.0]]), np.array([1, 1, 2]))
        out = normalize(ds)
        assert out.X[:, 0].tolist() == [-1.0, 0.0, 1.0]

    def test_constant_column_maps_to_zero(self):
        ds = Dataset(np.array([[7.0], [7.0], [7.0]]), np.array([1, 1, 2]))
        assert normalize(ds).X[:, 0].tolist() == [0.0, 0.0, 0.0]

    def test_out_of_range_extrapolates(self):
        train = normalize(Dataset(np.array([[2.0], [4.0]]), np.array([1, 2])))
        test = normalize(Dataset(np.array([[5.0]]), np.array([1])),
                         stats=(train.feature_min, train.feature_max))
        assert test.X[0, 0] == pytest.approx(2.0)

    def test_idempotent_with_own_stats(self):
        ds = make_blobs([(0, 0), (3, 3)], 10, 1.0, seed=1)
        once = normalize(ds)
        again = normalize(Dataset(once.X, once.y), stats=(np.array([-1.0, -1.0]),
                                                          np.array([1.0, 1.0])))
        np.testing.assert_allclose(again.X, once.X)

    def test_all_values_in_range(self):
        ds = normalize(make_blobs([(0, 0), (5, 5)], 30, 2.0, seed=2))
        assert ds.X.min() >= -1.0 and ds.X.max() <= 1.0

    def test_double_normalize_rejected(self):
        ds = normalize(make_blobs([(0, 0), (5, 5)], 5, 1.0))
        with pytest.raises(DatasetError):
            normalize(ds)


class TestMakeFolds:
    def test_perfect_stratification(self):
        ds = make_blobs([(0,), (5,)], 50, 0.5, seed=3)
        plan = make_folds(ds, 10, seed=0)
        for fold in range(10):
            idx = plan.test_indices(fold)
            assert len(idx) == 10
            assert int(np.sum(ds.y[idx] == 1)) == 5
            assert int(np.sum(ds.y[idx] == 2)) == 5

    def test_deterministic(self):
        ds = make_blobs([(0,), (5,)], 30, 0.5, seed=4)
        a = make_folds(ds, 5, seed=7)
        b = make_folds(ds, 5, seed=7)
        np.testing.assert_array_equal(a.assignments, b.assignments)

    def test_uneven_class_fold_sizes(self):
        # 10 examples of one class into 3 folds -> sizes {4, 3, 3}
        ds = Dataset(np.arange(10, dtype=float).reshape(-1, 1),
                     np.ones(10, dtype=np.int64))
        plan = make_folds(ds, 3, seed=0)
        sizes = sorted(len(plan.test_indices(f)) for f in range(3))
        assert sizes == [3, 3, 4]

    def test_partition(self):
        ds = make_blobs([(0,), (4,), (8,)], 17, 0.5, seed=5)
        plan = make_folds(ds, 4, seed=1)
        all_idx = np.concatenate([plan.test_indices(f) for f in range(4)])
        assert sorted(all_idx) == list(range(ds.n_examples))

    def test_per_class_counts_differ_by_at_most_one(self):
        ds = make_blobs([(0,), (4,), (8,)], 23, 0.5, seed=6)
        plan = make_folds(ds, 5, seed=2)
        for cls in ds.class_ids:
            counts = [int(np.sum(ds.y[plan.test_indices(f)] == cls))
                      for f in range(5)]
            assert max(counts) - min(counts) <= 1

    def test_k_too_large(self):
        ds = Dataset(np.zeros((3, 1)), np.array([1, 1, 2]))
        with pytest.raises(DatasetError):
            make_folds(ds, 4, seed=0)
