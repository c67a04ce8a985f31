"""Soft-margin binary SVM trained by SMO, plus the margin/radius statistics
used to rank node classifiers."""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

_GRAM_CACHE_LIMIT = 4000  # full Gram matrix below this many examples
_SV_EPS = 1e-8


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("rbf", "linear"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf" and not self.gamma > 0:
            raise ValueError("rbf kernel requires gamma > 0")

    def matrix(self, A, B=None):
        """Kernel matrix K[i, j] = k(A[i], B[j]); B defaults to A."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = A if B is None else np.atleast_2d(np.asarray(B, dtype=float))
        if self.kind == "linear":
            return A @ B.T
        sq = (np.sum(A * A, axis=1)[:, None] + np.sum(B * B, axis=1)[None, :]
              - 2.0 * (A @ B.T))
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-self.gamma * sq)


@dataclass(frozen=True)
class TrainConfig:
    c_reg: float = 10.0
    kernel: KernelSpec = field(default_factory=KernelSpec)
    tolerance: float = 1e-3
    max_passes: int = 0  # 0 -> automatic cap based on problem size

    def __post_init__(self):
        if not self.c_reg > 0:
            raise ValueError("c_reg must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    def iteration_cap(self, m):
        return self.max_passes if self.max_passes > 0 else max(20000, 200 * m)


@dataclass(frozen=True)
class ModelStats:
    """Inputs to the generalization-error bound.

    m: training-set size; l: examples with functional margin y*f(x) < 1;
    margin_delta: 1/||w|| in kernel space; radius: max kernel-space distance
    from a training point to the kernel-space centroid.
    """

    m: int
    l: int
    margin_delta: float
    radius: float
    dual_objective: float
    degenerate: bool = False


@dataclass(frozen=True)
class BinaryModel:
    support_vectors: np.ndarray
    dual_coefs: np.ndarray  # alpha_i * y_i
    bias: float
    kernel: KernelSpec
    stats: Optional[ModelStats] = None
    converged: bool = True

    def decision(self, x):
        return decision(self, x)


def decision(model: BinaryModel, x):
    """Decision value(s) sum_i coef_i k(sv_i, x) + bias.

    Accepts a single vector or a matrix of row vectors; sign >= 0 means the
    positive class set.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if len(model.support_vectors) == 0:
        out = np.full(len(X), model.bias)
    else:
        if X.shape[1] != model.support_vectors.shape[1]:
            raise ValueError("feature dimension mismatch")
        out = model.kernel.matrix(X, model.support_vectors) @ model.dual_coefs + model.bias
    return float(out[0]) if single else out


def _smo(K, y, C, tol, max_iter):
    """Pairwise coordinate ascent on the SVM dual.

    Working pair = most violating pair (largest KKT violation); stops when
    the violation gap drops below tol.  Returns (alpha, bias, converged).
    """
    m = len(y)
    alpha = np.zeros(m)
    grad = -np.ones(m)  # gradient of 1/2 a'Qa - e'a, Q = yy' * K

    converged = False
    for _ in range(max_iter):
        up = ((y > 0) & (alpha < C - _SV_EPS)) | ((y < 0) & (alpha > _SV_EPS))
        low = ((y > 0) & (alpha > _SV_EPS)) | ((y < 0) & (alpha < C - _SV_EPS))
        vals = -y * grad
        if not up.any() or not low.any():
            converged = True
            break
        vu = np.where(up, vals, -np.inf)
        vl = np.where(low, vals, np.inf)
        i = int(np.argmax(vu))
        j = int(np.argmin(vl))
        if vu[i] - vl[j] <= tol:
            converged = True
            break

        # analytic solve for the (i, j) pair
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta <= 0:
            eta = 1e-12
        delta = y[j] * (y[i] * grad[i] - y[j] * grad[j]) / eta

        if y[i] == y[j]:
            lo = max(0.0, alpha[j] + alpha[i] - C)
            hi = min(C, alpha[j] + alpha[i])
        else:
            lo = max(0.0, alpha[j] - alpha[i])
            hi = min(C, C + alpha[j] - alpha[i])
        aj_new = min(max(alpha[j] + delta, lo), hi)
        dj = aj_new - alpha[j]
        if dj == 0.0:
            converged = True
            break
        di = -y[i] * y[j] * dj
        alpha[i] += di
        alpha[j] = aj_new
        grad += y * (di * y[i] * K[i] + dj * y[j] * K[j])

    up = ((y > 0) & (alpha < C - _SV_EPS)) | ((y < 0) & (alpha > _SV_EPS))
    low = ((y > 0) & (alpha > _SV_EPS)) | ((y < 0) & (alpha < C - _SV_EPS))
    vals = -y * grad
    hi = vals[up].max() if up.any() else vals[low].min()
    lo_ = vals[low].min() if low.any() else vals[up].max()
    bias = (hi + lo_) / 2.0
    return alpha, float(bias), converged


def dual_objective(alpha, grad):
    # obj = e'a - 1/2 a'Qa, rewritten with grad = Qa - e
    return 0.5 * float(np.sum(alpha) - alpha @ grad)


def train(pos, neg, cfg: TrainConfig, gram=None) -> BinaryModel:
    """Train a soft-margin SVM with ``pos`` as the positive examples.

    ``gram`` may carry a precomputed kernel matrix over the stacked
    [pos; neg] examples; builders that reuse one global Gram matrix pass
    slices of it here.
    """
    pos = np.atleast_2d(np.asarray(pos, dtype=float))
    neg = np.atleast_2d(np.asarray(neg, dtype=float))
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("both classes need at least one example")
    if pos.shape[1] != neg.shape[1]:
        raise ValueError("feature dimension mismatch between classes")

    X = np.vstack([pos, neg])
    y = np.concatenate([np.ones(len(pos)), -np.ones(len(neg))])
    K = cfg.kernel.matrix(X) if gram is None else np.asarray(gram, dtype=float)

    alpha, bias, converged = _smo(K, y, cfg.c_reg, cfg.tolerance,
                                  cfg.iteration_cap(len(y)))

    sv = alpha > _SV_EPS
    model = BinaryModel(X[sv].copy(), (alpha * y)[sv].copy(), bias,
                        cfg.kernel, None, converged)
    stats = _stats_from_training(model, X, y, K, alpha)
    return replace(model, stats=stats)


def _stats_from_training(model, X, y, K, alpha):
    coefs = alpha * y
    w_sq = float(coefs @ K @ coefs)
    f = K @ coefs + model.bias
    l = int(np.sum(y * f < 1.0))
    grad = (y[:, None] * K * y[None, :]) @ alpha - 1.0
    obj = dual_objective(alpha, grad)

    m = len(y)
    mean_row = K.mean(axis=1)
    mean_all = float(K.mean())
    r_sq = np.max(np.diag(K) - 2.0 * mean_row + mean_all)
    radius = math.sqrt(max(r_sq, 0.0))

    degenerate = w_sq <= 1e-12
    delta = math.inf if degenerate else 1.0 / math.sqrt(w_sq)
    return ModelStats(m, l, delta, radius, obj, degenerate)


def compute_stats(model: BinaryModel, pos, neg) -> ModelStats:
    """Recompute ModelStats for a model against its own training data."""
    pos = np.atleast_2d(np.asarray(pos, dtype=float))
    neg = np.atleast_2d(np.asarray(neg, dtype=float))
    X = np.vstack([pos, neg])
    y = np.concatenate([np.ones(len(pos)), -np.ones(len(neg))])
    K = model.kernel.matrix(X)

    if len(model.support_vectors):
        Ksv = model.kernel.matrix(model.support_vectors)
        w_sq = float(model.dual_coefs @ Ksv @ model.dual_coefs)
    else:
        w_sq = 0.0
    f = decision(model, X)
    l = int(np.sum(y * f < 1.0))

    mean_row = K.mean(axis=1)
    mean_all = float(K.mean())
    radius = math.sqrt(max(np.max(np.diag(K) - 2.0 * mean_row + mean_all), 0.0))

    degenerate = w_sq <= 1e-12
    delta = math.inf if degenerate else 1.0 / math.sqrt(w_sq)
    obj = model.stats.dual_objective if model.stats else float("nan")
    return ModelStats(len(y), l, delta, radius, obj, degenerate)


def kkt_violation(model: BinaryModel, pos, neg, c_reg):
    """Largest violation of the KKT conditions over the training set.

    Returns 0 for a perfectly converged solution.  alpha is recovered from
    the signed dual coefficients; points absent from the support set have
    alpha = 0 and need y*f(x) >= 1.
    """
    pos = np.atleast_2d(np.asarray(pos, dtype=float))
    neg = np.atleast_2d(np.asarray(neg, dtype=float))
    X = np.vstack([pos, neg])
    y = np.concatenate([np.ones(len(pos)), -np.ones(len(neg))])
    f = decision(model, X)

    # map each training point to its alpha (0 if not a support vector)
    alphas = np.zeros(len(X))
    if len(model.support_vectors):
        sv_map = {tuple(v): abs(c) for v, c in
                  zip(model.support_vectors, model.dual_coefs)}
        for idx, x in enumerate(X):
            alphas[idx] = sv_map.get(tuple(x), 0.0)

    worst = 0.0
    for a, yi, fi in zip(alphas, y, f):
        margin = yi * fi
        if a <= _SV_EPS:
            worst = max(worst, 1.0 - margin)
        elif a >= c_reg - _SV_EPS:
            worst = max(worst, margin - 1.0)
        else:
            worst = max(worst, abs(margin - 1.0))
    return worst


# --- serialization ---------------------------------------------------------

def model_to_dict(model: BinaryModel) -> dict:
    d = {
        "kernel": {"kind": model.kernel.kind, "gamma": model.kernel.gamma},
        "support_vectors": model.support_vectors.tolist(),
        "dual_coefs": model.dual_coefs.tolist(),
        "bias": model.bias,
        "converged": model.converged,
        "stats": None,
    }
    if model.stats is not None:
        s = model.stats
        d["stats"] = {"m": s.m, "l": s.l, "margin_delta": s.margin_delta,
                      "radius": s.radius, "dual_objective": s.dual_objective,
                      "degenerate": s.degenerate}
    return d


def model_from_dict(d: dict) -> BinaryModel:
    stats = None
    if d.get("stats") is not None:
        stats = ModelStats(**d["stats"])
    sv = np.asarray(d["support_vectors"], dtype=float)
    if sv.size == 0:
        sv = sv.reshape(0, 0)
    return BinaryModel(sv, np.asarray(d["dual_coefs"], dtype=float),
                       d["bias"], KernelSpec(**d["kernel"]), stats,
                       d.get("converged", True))
