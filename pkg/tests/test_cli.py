import json

import numpy as np
import pytest

from svmtree.cli import main

from conftest import make_blobs


def write_dataset(path, ds):
    lines = [",".join(f"{v}" for v in x) + f",{int(c)}"
             for x, c in zip(ds.X, ds.y)]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def three_class_csv(tmp_path):
    ds = make_blobs([(0, 0), (8, 0), (0, 8)], 12, 0.4, seed=20)
    return write_dataset(tmp_path / "three.csv", ds)


class TestTrain:
    def test_tree_model_has_n_minus_one_internal_nodes(self, tmp_path,
                                                       three_class_csv):
        out = tmp_path / "out"
        rc = main(["train", "--dataset", three_class_csv,
                   "--strategy", "ibge_dtree", "--gamma-grid", "0.5",
                   "--c-grid", "10", "--out", str(out)])
        assert rc == 0
        payload = json.loads((out / "ibge_dtree_model.json").read_text())

        def count_internal(node):
            if "leaf" in node:
                return 0
            return 1 + count_internal(node["left"]) + count_internal(node["right"])

        assert count_internal(payload["model"]["tree"]) == 2
        assert (out / "manifest.json").exists()

    def test_unknown_strategy_usage_error(self, three_class_csv):
        with pytest.raises(SystemExit) as e:
            main(["train", "--dataset", three_class_csv,
                  "--strategy", "bogus"])
        assert e.value.code != 0

    def test_missing_file_nonzero_exit(self, tmp_path):
        rc = main(["train", "--dataset", str(tmp_path / "missing.csv"),
                   "--strategy", "ovo"])
        assert rc != 0


class TestPredict:
    @pytest.fixture
    def ovo_model(self, tmp_path):
        ds = make_blobs([(i * 6, 0) for i in range(10)], 6, 0.3, seed=21)
        csv_path = write_dataset(tmp_path / "ten.csv", ds)
        out = tmp_path / "model_out"
        rc = main(["train", "--dataset", csv_path, "--strategy", "ovo",
                   "--gamma-grid", "0.5", "--c-grid", "10",
                   "--out", str(out)])
        assert rc == 0
        return out / "ovo_model.json", csv_path, ds

    def test_decision_count_45_and_labels_reproduced(self, tmp_path, ovo_model):
        model_path, csv_path, ds = ovo_model
        pred_path = tmp_path / "preds.csv"
        rc = main(["predict", "--model", str(model_path), "--input", csv_path,
                   "--out", str(pred_path)])
        assert rc == 0
        lines = pred_path.read_text().strip().splitlines()
        assert lines[0] == "predicted_class,decisions"
        assert len(lines) == ds.n_examples + 1
        preds = [int(l.split(",")[0]) for l in lines[1:]]
        assert all(l.split(",")[1] == "45" for l in lines[1:])
        assert np.mean(np.array(preds) == ds.y) == 1.0

    def test_empty_input_header_only(self, tmp_path, ovo_model):
        model_path, _, _ = ovo_model
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        pred_path = tmp_path / "empty_preds.csv"
        rc = main(["predict", "--model", str(model_path), "--input", str(empty),
                   "--out", str(pred_path)])
        assert rc == 0
        assert pred_path.read_text() == "predicted_class,decisions\n"

    def test_dimension_mismatch_rejected(self, tmp_path, ovo_model):
        model_path, _, _ = ovo_model
        bad = tmp_path / "bad.csv"
        bad.write_text("1.0,2.0,3.0,4.0,5\n")
        rc = main(["predict", "--model", str(model_path), "--input", str(bad)])
        assert rc != 0


class TestBenchmark:
    def test_two_datasets_two_strategies(self, tmp_path):
        ds_a = make_blobs([(0, 0), (10, 0), (0, 10)], 9, 0.4, seed=22)
        ds_b = make_blobs([(0, 0), (12, 12)], 9, 0.4, seed=23)
        a = write_dataset(tmp_path / "a.csv", ds_a)
        b = write_dataset(tmp_path / "b.csv", ds_b)
        out = tmp_path / "bench"
        args = ["benchmark", "--dataset", a, "--dataset", b,
                "--strategy", "ovo", "--strategy", "ib_dtree",
                "--folds", "3", "--gamma-grid", "0.5", "--c-grid", "10",
                "--out", str(out), "--format", "csv"]
        rc = main(args)
        assert rc == 0
        text = (out / "report.csv").read_text()
        rows = text.strip().splitlines()[1:]
        assert len(rows) == 4 * 3  # cells x folds
        cells = {tuple(r.split(",")[:2]) for r in rows}
        assert cells == {("a", "ovo"), ("a", "ib_dtree"),
                         ("b", "ovo"), ("b", "ib_dtree")}
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["strategies"] == ["ovo", "ib_dtree"]

        # byte-identical on rerun
        rc2 = main(args)
        assert rc2 == 0
        assert (out / "report.csv").read_text() == text

    def test_missing_dataset_nonzero_exit(self, tmp_path):
        out = tmp_path / "bench2"
        rc = main(["benchmark", "--dataset", str(tmp_path / "nope.csv"),
                   "--strategy", "ovo", "--folds", "2",
                   "--gamma-grid", "0.5", "--c-grid", "10",
                   "--out", str(out)])
        assert rc != 0

    def test_env_var_output_dir(self, tmp_path, monkeypatch, three_class_csv):
        monkeypatch.setenv("SVMTREE_OUT", str(tmp_path / "envout"))
        rc = main(["benchmark", "--dataset", three_class_csv,
                   "--strategy", "ovo", "--folds", "2",
                   "--gamma-grid", "0.5", "--c-grid", "10"])
        assert rc == 0
        assert (tmp_path / "envout" / "report.csv").exists()
