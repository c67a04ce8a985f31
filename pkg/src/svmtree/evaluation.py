"""Cross-validation benchmark harness: per-fold accuracy, decision counts,
paired significance testing and report rendering."""

import hashlib
import io
import json
import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import baselines, trees
from .data import Dataset, make_folds, normalize
from .svm import KernelSpec, TrainConfig

STRATEGIES = ("ovo", "ova", "ddag", "adag", "bts_g", "cbts_g",
              "ib_dtree", "ibge_dtree")

# grids used in the original experimental protocol
DEFAULT_GAMMAS = (0.001, 0.01, 0.1, 1.0, 10.0)
DEFAULT_CS = (1.0, 10.0, 100.0, 1000.0)


@dataclass(frozen=True)
class HyperGrid:
    gammas: tuple = DEFAULT_GAMMAS
    cs: tuple = DEFAULT_CS

    def __post_init__(self):
        if not self.gammas or not self.cs:
            raise ValueError("hyperparameter grid must be non-empty")

    def points(self):
        return [(g, c) for g in self.gammas for c in self.cs]


@dataclass(frozen=True)
class FoldResult:
    fold: int
    accuracy: float
    mean_decisions: float
    train_s: float
    classify_s: float


@dataclass(frozen=True)
class CellResult:
    """All folds of one (dataset, method) combination."""

    dataset: str
    method: str
    folds: tuple
    failures: tuple = ()

    @property
    def accuracies(self):
        return [f.accuracy for f in self.folds]

    @property
    def mean_accuracy(self):
        return float(np.mean(self.accuracies)) if self.folds else math.nan

    @property
    def std_accuracy(self):
        return float(np.std(self.accuracies)) if self.folds else math.nan

    @property
    def mean_decisions(self):
        return float(np.mean([f.mean_decisions for f in self.folds])) \
            if self.folds else math.nan


@dataclass(frozen=True)
class PairwiseResult:
    method_a: str
    method_b: str
    p_value: Optional[float]
    wins: int
    losses: int
    draws: int


@dataclass(frozen=True)
class EvaluationReport:
    cells: tuple
    pairwise: tuple = ()


def derive_seed(*parts) -> int:
    """Stable seed from identifying strings; independent of execution order."""
    h = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(h[:8], "big")


def _fit_and_score(method, train_ds, test_ds, cfg, seed, frac, n_orders,
                   n_random_runs):
    """Train one strategy and score it on the held-out data.

    Returns (accuracy, mean decision count, train seconds, classify seconds).
    """
    Xtr, ytr = train_ds.X, train_ds.y
    Xte, yte = test_ds.X, test_ds.y
    classes = sorted(int(c) for c in np.unique(ytr))
    n = len(classes)
    gram = cfg.kernel.matrix(Xtr) if len(Xtr) <= 4000 else None

    t0 = time.perf_counter()
    if method in ("ovo", "ddag", "adag"):
        pool = baselines.train_ovo_pool(Xtr, ytr, cfg, gram=gram)
    elif method == "ova":
        pool = baselines.train_ova_pool(Xtr, ytr, cfg, gram=gram)
    elif method == "ib_dtree":
        tree = trees.build_ib_dtree(train_ds, cfg, gram=gram)
    elif method == "ibge_dtree":
        tree = trees.build_ibge_dtree(train_ds, cfg, frac=frac, gram=gram)
    elif method == "cbts_g":
        tree = trees.build_cbts_g(train_ds, cfg, gram=gram)
    elif method == "bts_g":
        built = [trees.build_bts_g(train_ds, cfg, seed=derive_seed(seed, r),
                                   gram=gram)
                 for r in range(n_random_runs)]
    else:
        raise ValueError(f"unknown strategy {method!r}")
    train_s = time.perf_counter() - t0

    t0 = time.perf_counter()
    if method == "ovo":
        table = baselines.ovo_decision_table(pool, Xte)
        votes = np.zeros((len(Xte), n), dtype=np.int64)
        col = {c: k for k, c in enumerate(classes)}
        for (i, j), vals in table.items():
            pos = vals >= 0
            votes[pos, col[i]] += 1
            votes[~pos, col[j]] += 1
        pred = np.array([classes[k] for k in np.argmax(votes, axis=1)])
        acc = float(np.mean(pred == yte))
        decisions = n * (n - 1) / 2
    elif method == "ova":
        scores = np.column_stack([pool.classifiers[c].decision(Xte)
                                  for c in classes])
        pred = np.array([classes[k] for k in np.argmax(scores, axis=1)])
        acc = float(np.mean(pred == yte))
        decisions = float(n)
    elif method in ("ddag", "adag"):
        table = baselines.ovo_decision_table(pool, Xte)
        walk = baselines._ddag_from_table if method == "ddag" \
            else baselines._adag_from_table
        rng = np.random.default_rng(derive_seed(seed, method, "orders"))
        accs = []
        for _ in range(n_orders):
            order = [classes[k] for k in rng.permutation(n)]
            hits = sum(walk(table, order, r)[0] == yte[r]
                       for r in range(len(Xte)))
            accs.append(hits / len(Xte))
        acc = float(np.mean(accs))
        decisions = float(n - 1)
    elif method == "bts_g":
        accs, decs = [], []
        for tree in built:
            out = [trees.classify_tree(tree, x) for x in Xte]
            accs.append(float(np.mean([p == t for (p, _), t in zip(out, yte)])))
            decs.append(float(np.mean([d for _, d in out])))
        acc = float(np.mean(accs))
        decisions = float(np.mean(decs))
    else:
        out = [trees.classify_tree(tree, x) for x in Xte]
        acc = float(np.mean([p == t for (p, _), t in zip(out, yte)]))
        decisions = float(np.mean([d for _, d in out]))
    classify_s = time.perf_counter() - t0
    return acc, float(decisions), train_s, classify_s


def select_hyperparams(train_ds: Dataset, method, grid: HyperGrid, seed,
                       base_cfg: TrainConfig, frac=0.2, inner_folds=3,
                       n_orders=10, n_random_runs=1):
    """Pick (gamma, C) by inner cross-validation on the training split.

    Ties go to the higher accuracy, then smaller C, then smaller gamma.
    A single-point grid is returned directly.
    """
    points = grid.points()
    if len(points) == 1:
        return points[0]

    k = min(inner_folds, min(int(np.sum(train_ds.y == c))
                             for c in train_ds.class_ids), len(train_ds.X))
    k = max(k, 2)
    plan = make_folds(train_ds, k, derive_seed(seed, "inner"))
    scored = []
    for gamma, c in points:
        cfg = TrainConfig(c_reg=c, kernel=KernelSpec("rbf", gamma),
                          tolerance=base_cfg.tolerance,
                          max_passes=base_cfg.max_passes)
        accs = []
        for fold in range(k):
            tr = train_ds.subset(plan.train_indices(fold))
            te = train_ds.subset(plan.test_indices(fold))
            if len(np.unique(tr.y)) < 2 or len(te.X) == 0:
                continue
            acc, _, _, _ = _fit_and_score(method, tr, te, cfg,
                                          derive_seed(seed, "inner", fold),
                                          frac, n_orders, n_random_runs)
            accs.append(acc)
        mean_acc = float(np.mean(accs)) if accs else 0.0
        scored.append((-mean_acc, c, gamma))
    scored.sort()
    _, c, gamma = scored[0]
    return gamma, c


def run_cv(ds: Dataset, method, grid: HyperGrid, k, seed, dataset_name="data",
           frac=0.2, tolerance=1e-3, n_orders=1000, n_random_runs=10,
           inner_folds=3) -> CellResult:
    """10-fold-style cross-validation of one strategy on one dataset.

    Test folds are normalized with the train fold's statistics.  Seeds are
    derived per (dataset, method, fold), so results do not depend on
    execution order.
    """
    if method not in STRATEGIES:
        raise ValueError(f"unknown strategy {method!r}")
    if ds.is_normalized:
        raise ValueError("run_cv expects raw data; folds are normalized internally")
    ds_hash = ds.content_hash()
    plan = make_folds(ds, k, derive_seed(seed, ds_hash, "folds"))

    folds, failures = [], []
    for fold in range(k):
        raw_tr = ds.subset(plan.train_indices(fold))
        raw_te = ds.subset(plan.test_indices(fold))
        tr = normalize(raw_tr)
        te = normalize(raw_te, stats=(tr.feature_min, tr.feature_max))
        fold_seed = derive_seed(seed, ds_hash, method, fold)
        try:
            gamma, c = select_hyperparams(
                tr, method, grid, fold_seed,
                TrainConfig(tolerance=tolerance), frac=frac,
                inner_folds=inner_folds)
            cfg = TrainConfig(c_reg=c, kernel=KernelSpec("rbf", gamma),
                              tolerance=tolerance)
            acc, dec, ts, cs = _fit_and_score(method, tr, te, cfg, fold_seed,
                                              frac, n_orders, n_random_runs)
            folds.append(FoldResult(fold, acc, dec, ts, cs))
        except trees.TreeBuildError as e:
            failures.append((fold, str(e)))
    return CellResult(dataset_name, method, tuple(folds), tuple(failures))


# --- Wilcoxon signed-rank test ---------------------------------------------

@dataclass(frozen=True)
class WilcoxonResult:
    p_value: Optional[float]
    wins: int
    losses: int
    draws: int
    statistic: float = math.nan
    exact: bool = True


def _average_ranks(values):
    """Ranks 1..n with ties averaged."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def wilcoxon_signed_rank(a, b, exact_limit=25) -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test on paired samples.

    Zero differences are dropped (reported as draws); tied absolute
    differences get averaged ranks.  Exact sign-assignment distribution up
    to ``exact_limit`` non-zero pairs, normal approximation with continuity
    correction above.  Fewer than 5 non-zero differences leaves the p-value
    undefined (None).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) != len(b):
        raise ValueError("paired samples must have equal length")
    d = a - b
    wins = int(np.sum(d > 0))
    losses = int(np.sum(d < 0))
    draws = int(np.sum(d == 0))

    d = d[d != 0]
    n = len(d)
    if n < 5:
        return WilcoxonResult(None, wins, losses, draws)

    ranks = _average_ranks(np.abs(d))
    w_plus = float(np.sum(ranks[d > 0]))

    if n <= exact_limit:
        p = _exact_two_sided(ranks, w_plus)
        return WilcoxonResult(p, wins, losses, draws, w_plus, True)

    mu = n * (n + 1) / 4.0
    ties = np.unique(ranks, return_counts=True)[1]
    var = n * (n + 1) * (2 * n + 1) / 24.0 - float(np.sum(ties ** 3 - ties)) / 48.0
    z = (w_plus - mu - 0.5 * np.sign(w_plus - mu)) / math.sqrt(var)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return WilcoxonResult(min(1.0, p), wins, losses, draws, w_plus, False)


def _exact_two_sided(ranks, w_plus):
    """p = min(1, 2 * min(P(W+ <= w), P(W+ >= w))) via subset-sum counting.

    Works on doubled ranks so averaged (half-integer) ranks stay integral.
    """
    doubled = [int(round(2 * r)) for r in ranks]
    total = sum(doubled)
    counts = np.zeros(total + 1, dtype=object)
    counts[0] = 1
    for r in doubled:
        counts[r:] = counts[r:] + counts[:-r]
    w2 = int(round(2 * w_plus))
    n_assign = 2 ** len(ranks)
    p_le = int(np.sum(counts[:w2 + 1])) / n_assign
    p_ge = int(np.sum(counts[w2:])) / n_assign
    return min(1.0, 2.0 * min(p_le, p_ge))


# --- report rendering ------------------------------------------------------

def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def emit_report(report: EvaluationReport, format="text",
                include_timing=False) -> str:
    """Render a report deterministically.

    Wall-clock columns are blank unless ``include_timing`` is set, so that
    identical runs produce byte-identical output.
    """
    if format == "csv":
        return _emit_csv(report, include_timing)
    if format == "json":
        return _emit_json(report, include_timing)
    if format == "text":
        return _emit_text(report)
    raise ValueError(f"unknown report format {format!r}")


def _sorted_cells(report):
    return sorted(report.cells, key=lambda c: (c.dataset, c.method))


def _emit_csv(report, include_timing):
    out = io.StringIO()
    out.write("dataset,method,fold,accuracy,mean_decisions,train_s,classify_s\n")
    for cell in _sorted_cells(report):
        for f in sorted(cell.folds, key=lambda f: f.fold):
            ts = _fmt(round(f.train_s, 3)) if include_timing else ""
            cs = _fmt(round(f.classify_s, 3)) if include_timing else ""
            out.write(f"{cell.dataset},{cell.method},{f.fold},"
                      f"{_fmt(f.accuracy)},{_fmt(f.mean_decisions)},{ts},{cs}\n")
    return out.getvalue()


def _emit_json(report, include_timing):
    cells = []
    for cell in _sorted_cells(report):
        cells.append({
            "dataset": cell.dataset,
            "method": cell.method,
            "mean_accuracy": cell.mean_accuracy,
            "std_accuracy": cell.std_accuracy,
            "mean_decisions": cell.mean_decisions,
            "folds": [{
                "fold": f.fold, "accuracy": f.accuracy,
                "mean_decisions": f.mean_decisions,
                **({"train_s": f.train_s, "classify_s": f.classify_s}
                   if include_timing else {}),
            } for f in sorted(cell.folds, key=lambda f: f.fold)],
            "failures": [list(f) for f in cell.failures],
        })
    pairwise = [{
        "method_a": p.method_a, "method_b": p.method_b, "p_value": p.p_value,
        "wins": p.wins, "losses": p.losses, "draws": p.draws,
    } for p in sorted(report.pairwise, key=lambda p: (p.method_a, p.method_b))]
    return json.dumps({"cells": cells, "pairwise": pairwise},
                      indent=2, sort_keys=True) + "\n"


def _emit_text(report):
    out = io.StringIO()
    out.write(f"{'dataset':<20} {'method':<12} {'accuracy':>18} {'decisions':>10}\n")
    for cell in _sorted_cells(report):
        acc = f"{cell.mean_accuracy * 100:.3f} +- {cell.std_accuracy * 100:.3f}"
        out.write(f"{cell.dataset:<20} {cell.method:<12} {acc:>18} "
                  f"{cell.mean_decisions:>10.3f}\n")
    if report.pairwise:
        out.write("\npairwise (Wilcoxon signed-rank, two-sided):\n")
        for p in sorted(report.pairwise, key=lambda p: (p.method_a, p.method_b)):
            pv = "undefined" if p.p_value is None else f"{p.p_value:.4f}"
            out.write(f"  {p.method_a} vs {p.method_b}: p={pv} "
                      f"({p.wins}-{p.losses}-{p.draws})\n")
    return out.getvalue()
