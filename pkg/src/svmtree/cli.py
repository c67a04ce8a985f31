"""Command-line entry point: train, predict and benchmark subcommands."""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, baselines, trees
from .data import Dataset, DatasetError, load_csv, normalize
from .evaluation import (EvaluationReport, HyperGrid, PairwiseResult,
                         STRATEGIES, TrainConfig, derive_seed, emit_report,
                         run_cv, select_hyperparams, wilcoxon_signed_rank)
from .svm import KernelSpec, model_from_dict, model_to_dict

MODEL_FORMAT_VERSION = 1


def _float_list(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def build_parser():
    p = argparse.ArgumentParser(prog="svmtree",
                                description="Multi-class SVM reductions: "
                                            "decision trees and baselines.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, multi_strategy):
        sp.add_argument("--dataset", action="append", required=True,
                        help="CSV dataset path (repeatable for benchmark)")
        sp.add_argument("--label-col", type=int, default=-1,
                        help="label column index (default: last)")
        sp.add_argument("--header", action="store_true",
                        help="skip a header row")
        sp.add_argument("--strategy", action="append" if multi_strategy else None,
                        choices=STRATEGIES, required=True)
        sp.add_argument("--folds", type=int, default=10)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--gamma-grid", type=_float_list,
                        default=(0.001, 0.01, 0.1, 1.0, 10.0))
        sp.add_argument("--c-grid", type=_float_list,
                        default=(1.0, 10.0, 100.0, 1000.0))
        sp.add_argument("--frac", type=float, default=0.2,
                        help="shortlist fraction for bound-based selection")
        sp.add_argument("--out", default=None,
                        help="output directory (or $SVMTREE_OUT)")
        sp.add_argument("--format", choices=("text", "csv", "json"),
                        default="csv")

    t = sub.add_parser("train", help="train one strategy on a full dataset")
    common(t, multi_strategy=False)

    pr = sub.add_parser("predict", help="classify a CSV with a trained model")
    pr.add_argument("--model", required=True)
    pr.add_argument("--input", required=True)
    pr.add_argument("--label-col", type=int, default=-1)
    pr.add_argument("--header", action="store_true")
    pr.add_argument("--out", default=None)

    b = sub.add_parser("benchmark", help="cross-validated comparison")
    common(b, multi_strategy=True)
    b.add_argument("--n-orders", type=int, default=1000,
                   help="random class orders averaged for ddag/adag")
    b.add_argument("--random-runs", type=int, default=10,
                   help="seeded rebuilds averaged for bts_g")
    b.add_argument("--timing", action="store_true",
                   help="include wall-clock columns (non-deterministic)")
    return p


def _out_dir(args):
    out = args.out or os.environ.get("SVMTREE_OUT") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load(args, path):
    ds = load_csv(path, label_column=args.label_col, header=args.header)
    if ds.n_classes < 2:
        raise DatasetError(f"{path}: need at least 2 classes")
    return ds


def _strategy_model(strategy, ds, cfg, seed, frac):
    gram = cfg.kernel.matrix(ds.X) if len(ds.X) <= 4000 else None
    if strategy in ("ovo", "ddag", "adag"):
        pool = baselines.train_ovo_pool(ds.X, ds.y, cfg, gram=gram)
        return {"kind": "ovo_pool",
                "classifiers": {f"{i},{j}": model_to_dict(m)
                                for (i, j), m in pool.classifiers.items()}}
    if strategy == "ova":
        pool = baselines.train_ova_pool(ds.X, ds.y, cfg, gram=gram)
        return {"kind": "ova_pool",
                "classifiers": {str(c): model_to_dict(m)
                                for c, m in pool.classifiers.items()}}
    if strategy == "ib_dtree":
        tree = trees.build_ib_dtree(ds, cfg, gram=gram)
    elif strategy == "ibge_dtree":
        tree = trees.build_ibge_dtree(ds, cfg, frac=frac, gram=gram)
    elif strategy == "bts_g":
        tree = trees.build_bts_g(ds, cfg, seed=seed, gram=gram)
    elif strategy == "cbts_g":
        tree = trees.build_cbts_g(ds, cfg, gram=gram)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return {"kind": "tree", "tree": trees.tree_to_dict(tree)}


def cmd_train(args):
    path = args.dataset[0]
    raw = _load(args, path)
    ds = normalize(raw)
    grid = HyperGrid(args.gamma_grid, args.c_grid)
    gamma, c = select_hyperparams(ds, args.strategy, grid, args.seed,
                                  TrainConfig(), frac=args.frac)
    cfg = TrainConfig(c_reg=c, kernel=KernelSpec("rbf", gamma))
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "strategy": args.strategy,
        "n_classes": ds.n_classes,
        "original_labels": list(ds.original_labels),
        "normalization": {"min": ds.feature_min.tolist(),
                          "max": ds.feature_max.tolist()},
        "gamma": gamma, "c": c,
        "model": _strategy_model(args.strategy, ds, cfg, args.seed, args.frac),
    }
    out = _out_dir(args)
    model_path = out / f"{args.strategy}_model.json"
    model_path.write_text(json.dumps(payload, sort_keys=True))
    manifest = {
        "command": "train", "dataset": path,
        "dataset_sha256": raw.content_hash(), "strategy": args.strategy,
        "seed": args.seed, "gamma_grid": list(args.gamma_grid),
        "c_grid": list(args.c_grid), "frac": args.frac,
        "selected": {"gamma": gamma, "c": c}, "version": __version__,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True,
                                                  indent=2))
    print(model_path)
    return 0


def _predictor(payload):
    kind = payload["model"]["kind"]
    if kind == "tree":
        tree = trees.tree_from_dict(payload["model"]["tree"])
        return lambda x: trees.classify_tree(tree, x)
    if kind == "ovo_pool":
        classifiers = {tuple(int(v) for v in key.split(",")): model_from_dict(d)
                       for key, d in payload["model"]["classifiers"].items()}
        classes = tuple(sorted({c for pair in classifiers for c in pair}))
        pool = baselines.OvoPool(classifiers, classes)
        strategy = payload["strategy"]
        if strategy == "ovo":
            return lambda x: baselines.classify_ovo_maxwins(pool, x)
        order = list(classes)
        if strategy == "ddag":
            return lambda x: baselines.classify_ddag(pool, order, x)
        return lambda x: baselines.classify_adag(pool, order, x)
    if kind == "ova_pool":
        classifiers = {int(c): model_from_dict(d)
                       for c, d in payload["model"]["classifiers"].items()}
        pool = baselines.OvaPool(classifiers, tuple(sorted(classifiers)))
        return lambda x: baselines.classify_ova(pool, x)
    raise ValueError(f"corrupt model: unknown kind {kind!r}")


def cmd_predict(args):
    payload = json.loads(Path(args.model).read_text())
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError("unsupported model file version")
    lo = np.asarray(payload["normalization"]["min"], dtype=float)
    hi = np.asarray(payload["normalization"]["max"], dtype=float)
    dim = len(lo)

    rows = _read_feature_rows(args.input, dim, args.label_col, args.header)
    X = np.asarray(rows, dtype=float)
    if len(X):
        ds = Dataset(X, np.ones(len(X), dtype=np.int64))
        X = normalize(ds, stats=(lo, hi)).X

    predict = _predictor(payload)
    originals = payload["original_labels"]
    lines = ["predicted_class,decisions"]
    for x in X:
        cls, dec = predict(x)
        label = originals[cls - 1] if 0 < cls <= len(originals) else str(cls)
        lines.append(f"{label},{dec}")
    text = "\n".join(lines) + "\n"
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _read_feature_rows(path, dim, label_col, header):
    import csv as _csv
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        for lineno, row in enumerate(_csv.reader(f), start=1):
            if not row:
                continue
            if header and lineno == 1:
                continue
            if len(row) == dim:
                feats = row
            elif len(row) == dim + 1:
                col = label_col if label_col >= 0 else len(row) + label_col
                feats = row[:col] + row[col + 1:]
            else:
                raise DatasetError(f"{path}: row {lineno} has {len(row)} fields,"
                                   f" expected {dim} or {dim + 1}")
            try:
                rows.append([float(v) for v in feats])
            except ValueError:
                raise DatasetError(f"{path}: row {lineno}: non-numeric feature")
    return rows


def cmd_benchmark(args):
    grid = HyperGrid(args.gamma_grid, args.c_grid)
    out = _out_dir(args)
    cells = []
    load_errors = []
    for path in args.dataset:
        name = Path(path).stem
        try:
            ds = _load(args, path)
        except (DatasetError, OSError) as e:
            load_errors.append((path, str(e)))
            continue
        for strategy in args.strategy:
            cells.append(run_cv(ds, strategy, grid, args.folds, args.seed,
                                dataset_name=name, frac=args.frac,
                                n_orders=args.n_orders,
                                n_random_runs=args.random_runs))

    pairwise = []
    names = sorted({c.dataset for c in cells})
    by_key = {(c.dataset, c.method): c for c in cells}
    for i, ma in enumerate(args.strategy):
        for mb in args.strategy[i + 1:]:
            accs_a = [by_key[(n, ma)].mean_accuracy for n in names
                      if (n, ma) in by_key and (n, mb) in by_key]
            accs_b = [by_key[(n, mb)].mean_accuracy for n in names
                      if (n, ma) in by_key and (n, mb) in by_key]
            if not accs_a:
                continue
            w = wilcoxon_signed_rank(accs_a, accs_b) if len(accs_a) >= 5 else None
            if w is None:
                d = np.asarray(accs_a) - np.asarray(accs_b)
                pairwise.append(PairwiseResult(ma, mb, None,
                                               int(np.sum(d > 0)),
                                               int(np.sum(d < 0)),
                                               int(np.sum(d == 0))))
            else:
                pairwise.append(PairwiseResult(ma, mb, w.p_value, w.wins,
                                               w.losses, w.draws))

    report = EvaluationReport(tuple(cells), tuple(pairwise))
    ext = {"text": "txt", "csv": "csv", "json": "json"}[args.format]
    report_path = out / f"report.{ext}"
    report_path.write_text(emit_report(report, args.format,
                                       include_timing=args.timing))
    manifest = {
        "command": "benchmark",
        "datasets": {Path(p).stem: _dataset_hash_or_none(args, p)
                     for p in args.dataset},
        "strategies": list(args.strategy), "folds": args.folds,
        "seed": args.seed, "gamma_grid": list(args.gamma_grid),
        "c_grid": list(args.c_grid), "frac": args.frac,
        "n_orders": args.n_orders, "random_runs": args.random_runs,
        "version": __version__,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True,
                                                  indent=2))
    print(report_path)

    failed = bool(load_errors) or any(c.failures for c in cells)
    for path, err in load_errors:
        print(f"error: {path}: {err}", file=sys.stderr)
    for c in cells:
        for fold, err in c.failures:
            print(f"error: {c.dataset}/{c.method} fold {fold}: {err}",
                  file=sys.stderr)
    return 1 if failed else 0


def _dataset_hash_or_none(args, path):
    try:
        return _load(args, path).content_hash()
    except (DatasetError, OSError):
        return None


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            return cmd_train(args)
        if args.command == "predict":
            return cmd_predict(args)
        return cmd_benchmark(args)
    except (DatasetError, OSError, ValueError, trees.TreeBuildError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
