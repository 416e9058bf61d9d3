"""From-scratch SVM solvers over precomputed kernel matrices.

``train`` solves the one-class dual

    minimize 1/2 a^T K a   s.t.  0 <= a_i <= 1/(nu*N),  sum a_i = 1

by pairwise SMO updates with maximal-violating-pair selection. The
solver only ever reads kernel entries, so quantum-fidelity and
dot-product Gram matrices go through identical code. A brute-force
grid oracle (``brute_force_dual``) and a soft-margin binary C-SVM used
as the attack-impact baseline live here too.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InferenceError, OracleError, TrainingError

INLIER = "inlier"
OUTLIER = "outlier"


def _as_kernel_array(K) -> np.ndarray:
    values = getattr(K, "values", K)
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ConfigurationError(f"kernel matrix must be square, got shape {values.shape}")
    return values


@dataclass(frozen=True)
class DualProblem:
    K: np.ndarray
    nu: float
    tolerance: float = 1e-6
    max_iterations: int = 100_000

    def __post_init__(self):
        object.__setattr__(self, "K", _as_kernel_array(self.K))
        if not 0 < self.nu <= 1:
            raise ConfigurationError(f"nu must be in (0, 1], got {self.nu}")
        if self.tolerance <= 0:
            raise ConfigurationError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ConfigurationError(f"max_iterations must be positive, got {self.max_iterations}")


@dataclass
class OcsvmModel:
    alphas: np.ndarray
    support_indices: np.ndarray
    rho: float
    nu: float
    kernel_kind: str
    training_refs: np.ndarray | None
    converged: bool = True
    iterations: int = 0
    objective_trace: list = field(default_factory=list)

    @property
    def support_alphas(self) -> np.ndarray:
        return self.alphas[self.support_indices]

    def to_json(self) -> str:
        return json.dumps({
            "alphas": self.alphas.tolist(),
            "support_indices": self.support_indices.tolist(),
            "rho": self.rho,
            "nu": self.nu,
            "kernel_kind": self.kernel_kind,
            "training_refs": None if self.training_refs is None else self.training_refs.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "OcsvmModel":
        doc = json.loads(text)
        refs = doc["training_refs"]
        return cls(
            np.asarray(doc["alphas"], dtype=np.float64),
            np.asarray(doc["support_indices"], dtype=np.int64),
            float(doc["rho"]),
            float(doc["nu"]),
            doc["kernel_kind"],
            None if refs is None else np.asarray(refs, dtype=np.float64),
        )


def train(problem: DualProblem, *, kernel_kind: str = "quantum_fidelity",
          training_refs=None, track_objective: bool = False) -> OcsvmModel:
    """Solve the one-class dual by SMO.

    Starts from the uniform feasible point (which is also the returned
    optimum for fully degenerate all-equal kernels) and moves mass
    between the most violating pair until the KKT gap drops below the
    tolerance. rho is recovered from margin support vectors, falling
    back to all support vectors when none is strictly inside the box.
    """
    K = problem.K
    n = K.shape[0]
    nu = problem.nu
    if n * nu < 1.0 - 1e-12:
        raise TrainingError(f"infeasible problem: need N >= 1/nu, got N={n}, nu={nu}")
    box = 1.0 / (nu * n)
    alpha = np.full(n, 1.0 / n)
    g = K @ alpha

    trace = []
    if track_objective:
        trace.append(0.5 * float(alpha @ g))
    converged = False
    iterations = 0
    while iterations < problem.max_iterations:
        up = alpha < box - 1e-12
        low = alpha > 1e-12
        if not up.any() or not low.any():
            converged = True  # box is saturated (nu = 1): nothing can move
            break
        i = np.flatnonzero(up)[np.argmin(g[up])]
        j = np.flatnonzero(low)[np.argmax(g[low])]
        if g[j] - g[i] <= problem.tolerance:
            converged = True
            break
        iterations += 1
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        eta = max(eta, 1e-12)
        t = (g[j] - g[i]) / eta
        room_i = box - alpha[i]
        room_j = alpha[j]
        if t >= room_i and room_i <= room_j:
            t = room_i
            alpha[i] = box
            alpha[j] -= t
        elif t >= room_j:
            t = room_j
            alpha[i] += t
            alpha[j] = 0.0
        else:
            alpha[i] += t
            alpha[j] -= t
        g += t * (K[:, i] - K[:, j])
        if track_objective:
            trace.append(0.5 * float(alpha @ (K @ alpha)))

    support = np.flatnonzero(alpha > 0)
    margin = np.flatnonzero((alpha > 1e-12) & (alpha < box - 1e-9))
    basis = margin if margin.size else support
    rho = float(np.mean(g[basis]))
    refs = None if training_refs is None else np.atleast_2d(np.asarray(training_refs))[support]
    return OcsvmModel(alpha, support, rho, nu, kernel_kind, refs,
                      converged=converged, iterations=iterations,
                      objective_trace=trace)


def decision(model: OcsvmModel, k_row) -> float:
    """Signed anomaly score: sum_i alpha_i k(x_i, x) - rho; positive means inlier.

    ``k_row`` holds kernel values between the query and the model's
    support vectors, in support order.
    """
    k_row = np.asarray(k_row, dtype=np.float64)
    if k_row.shape != (model.support_indices.shape[0],):
        raise InferenceError(
            f"kernel row has shape {k_row.shape}, expected ({model.support_indices.shape[0]},)"
        )
    return float(model.support_alphas @ k_row - model.rho)


def decision_values(model: OcsvmModel, k_rows) -> np.ndarray:
    """Vectorized ``decision`` for an (m x n_support) block of kernel rows."""
    k_rows = np.atleast_2d(np.asarray(k_rows, dtype=np.float64))
    if k_rows.shape[1] != model.support_indices.shape[0]:
        raise InferenceError(
            f"kernel rows have {k_rows.shape[1]} columns, expected {model.support_indices.shape[0]}"
        )
    return k_rows @ model.support_alphas - model.rho


def predict(model: OcsvmModel, k_row) -> str:
    """inlier/outlier call; an exact zero score counts as inlier."""
    return INLIER if decision(model, k_row) >= 0 else OUTLIER


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _pairwise_descent(K: np.ndarray, alpha: np.ndarray, box: float, sweeps: int = 500):
    n = alpha.shape[0]
    g = K @ alpha
    for _ in range(sweeps):
        best_change = 0.0
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                # move mass j -> i
                gap = g[j] - g[i]
                if gap <= 0:
                    continue
                eta = max(K[i, i] + K[j, j] - 2.0 * K[i, j], 1e-12)
                t = min(gap / eta, box - alpha[i], alpha[j])
                if t <= 0:
                    continue
                alpha[i] += t
                alpha[j] -= t
                g += t * (K[:, i] - K[:, j])
                best_change = max(best_change, t * gap - 0.5 * eta * t * t)
        if best_change < 1e-14:
            break
    return alpha


def brute_force_dual(K, nu: float, grid_steps: int = 12) -> float:
    """Test oracle: minimize the one-class dual objective by grid search.

    Enumerates the simplex grid with ``grid_steps`` subdivisions, keeps
    the best box-feasible point, and polishes it with exhaustive pairwise
    line searches. Only meant for N <= 8.
    """
    K = _as_kernel_array(K)
    n = K.shape[0]
    if n > 8:
        raise OracleError(f"brute_force_dual supports N <= 8, got {n}")
    if not 0 < nu <= 1:
        raise ConfigurationError(f"nu must be in (0, 1], got {nu}")
    box = 1.0 / (nu * n)
    best = None
    best_alpha = None
    for comp in _compositions(grid_steps, n):
        alpha = np.array(comp, dtype=np.float64) / grid_steps
        if np.any(alpha > box + 1e-12):
            continue
        value = 0.5 * float(alpha @ K @ alpha)
        if best is None or value < best:
            best = value
            best_alpha = alpha
    if best_alpha is None:
        # grid too coarse for a tight box; start from the uniform point
        best_alpha = np.full(n, 1.0 / n)
    alpha = _pairwise_descent(K, best_alpha.copy(), box)
    return 0.5 * float(alpha @ K @ alpha)


def dual_objective(model_or_alpha, K) -> float:
    alpha = getattr(model_or_alpha, "alphas", model_or_alpha)
    K = _as_kernel_array(K)
    return 0.5 * float(alpha @ K @ alpha)


@dataclass
class CsvmModel:
    alphas: np.ndarray
    labels: np.ndarray  # +-1
    bias: float
    support_indices: np.ndarray
    converged: bool = True
    iterations: int = 0

    def decision_values(self, k_rows) -> np.ndarray:
        k_rows = np.atleast_2d(np.asarray(k_rows, dtype=np.float64))
        coef = self.alphas[self.support_indices] * self.labels[self.support_indices]
        if k_rows.shape[1] != self.support_indices.shape[0]:
            raise InferenceError(
                f"kernel rows have {k_rows.shape[1]} columns, expected {self.support_indices.shape[0]}"
            )
        return k_rows @ coef + self.bias


def train_binary_csvm(K, labels, C: float = 1.0, tolerance: float = 1e-6,
                      max_iterations: int = 200_000) -> CsvmModel:
    """Soft-margin binary C-SVM dual solved by SMO.

    minimize 1/2 a^T (yy^T * K) a - sum a   s.t. 0 <= a_i <= C, y^T a = 0.
    """
    K = _as_kernel_array(K)
    y = np.asarray(labels, dtype=np.float64)
    if set(np.unique(y)) != {-1.0, 1.0}:
        raise TrainingError("binary C-SVM needs both labels -1 and +1")
    if C <= 0:
        raise ConfigurationError(f"C must be positive, got {C}")
    n = K.shape[0]
    alpha = np.zeros(n)
    g = -np.ones(n)  # gradient of the dual objective at alpha = 0

    converged = False
    iterations = 0
    while iterations < max_iterations:
        up = ((y > 0) & (alpha < C - 1e-12)) | ((y < 0) & (alpha > 1e-12))
        low = ((y > 0) & (alpha > 1e-12)) | ((y < 0) & (alpha < C - 1e-12))
        if not up.any() or not low.any():
            converged = True
            break
        score = -y * g
        i = np.flatnonzero(up)[np.argmax(score[up])]
        j = np.flatnonzero(low)[np.argmin(score[low])]
        m, M = score[i], score[j]
        if m - M <= tolerance:
            converged = True
            break
        iterations += 1
        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(K[i, i] + K[j, j] + 2.0 * K[i, j], 1e-12)
            delta = (-g[i] - g[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0 and alpha[j] < 0:
                alpha[j] = 0.0
                alpha[i] = diff
            elif diff <= 0 and alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = -diff
            if diff > 0 and alpha[i] > C:
                alpha[i] = C
                alpha[j] = C - diff
            elif diff <= 0 and alpha[j] > C:
                alpha[j] = C
                alpha[i] = C + diff
        else:
            quad = max(K[i, i] + K[j, j] - 2.0 * K[i, j], 1e-12)
            delta = (g[i] - g[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if alpha[i] > C:
                alpha[i] = C
                alpha[j] = total - C
            elif alpha[j] < 0:
                alpha[j] = 0.0
                alpha[i] = total
            if alpha[j] > C:
                alpha[j] = C
                alpha[i] = total - C
            elif alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = total
        d_i = alpha[i] - old_i
        d_j = alpha[j] - old_j
        g += (y * y[i] * K[:, i]) * d_i + (y * y[j] * K[:, j]) * d_j

    score = -y * g
    margin = np.flatnonzero((alpha > 1e-9) & (alpha < C - 1e-9))
    if margin.size:
        bias = float(np.mean(score[margin]))
    else:
        up = ((y > 0) & (alpha < C - 1e-12)) | ((y < 0) & (alpha > 1e-12))
        low = ((y > 0) & (alpha > 1e-12)) | ((y < 0) & (alpha < C - 1e-12))
        if up.any() and low.any():
            bias = float((score[up].max() + score[low].min()) / 2.0)
        else:
            bias = 0.0
    support = np.flatnonzero(alpha > 1e-12)
    return CsvmModel(alpha, y, bias, support, converged=converged, iterations=iterations)


def csvm_predict(model: CsvmModel, k_row) -> int:
    """Predicted label in {-1, +1}; a zero score maps to +1."""
    value = model.decision_values(np.atleast_2d(k_row))[0]
    return 1 if value >= 0 else -1


def train_multiclass_csvm(K, labels, class_count: int, C: float = 1.0,
                          tolerance: float = 1e-6) -> list[CsvmModel]:
    """One-vs-rest wrapper around the binary solver."""
    if class_count < 2:
        raise TrainingError("multiclass training needs >= 2 classes")
    models = []
    labels = np.asarray(labels)
    for c in range(class_count):
        y = np.where(labels == c, 1.0, -1.0)
        if len(set(np.unique(y))) < 2:
            raise TrainingError(f"class {c} is missing or covers the whole dataset")
        models.append(train_binary_csvm(K, y, C=C, tolerance=tolerance))
    return models


def multiclass_predict(models: list[CsvmModel], k_rows) -> np.ndarray:
    """argmax over the per-class one-vs-rest decision values."""
    scores = np.stack(
        [m.decision_values(np.atleast_2d(k_rows)[:, m.support_indices]) for m in models],
        axis=1,
    )
    return np.argmax(scores, axis=1)


def one_class_score_fn(features, nu: float = 0.1):
    """Dot-kernel one-class decision score over ``features``.

    Returns a callable mapping an (m x d) block to m signed scores; used
    as the FGSM gradient source for single-class data.
    """
    X = np.atleast_2d(np.asarray(features, dtype=np.float64))
    K = X @ X.T
    model = train(DualProblem(K, nu), kernel_kind="dot_product", training_refs=X)

    def score(queries):
        Q = np.atleast_2d(np.asarray(queries, dtype=np.float64))
        return decision_values(model, Q @ model.training_refs.T)

    return score
