"""From-scratch linear classifiers over feature vectors.

Both trainers minimize a class-weighted, sample-averaged loss plus an L2
penalty on the weights (never the bias):

    J(w, b) = (1/W) * sum_i cw_i * loss_i  +  (lambda/2) * ||w||^2

with W = sum_i cw_i.  Normalizing by total class weight makes
"duplicate every Case sample k times" and "weight Case by k" the same
objective, which the tests exploit.  Logistic regression runs full-batch
gradient descent with Armijo backtracking; the linear SVM runs Pegasos
(stochastic subgradient, step 1/(lambda*t), averaged iterates).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from . import kernels
from .errors import TrainingError

MODEL_FORMAT_VERSION = "1.0"


class ModelKind(enum.Enum):
    LOGISTIC_REGRESSION = "LogisticRegression"
    LINEAR_SVM = "LinearSVM"


@dataclass(frozen=True, eq=False)
class StandardizerParams:
    mean: np.ndarray
    std: np.ndarray
    fitted_subjects: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.mean.shape != self.std.shape or self.mean.ndim != 1:
            raise TrainingError("fit_standardizer", "mean/std shape mismatch")


@dataclass(frozen=True, eq=False)
class LinearModel:
    kind: ModelKind
    weights: np.ndarray
    bias: float
    l2_lambda: float
    class_weights: tuple[float, float]  # (w_case, w_control)
    training_meta: Mapping[str, float] = field(default_factory=dict)
    fitted_subjects: frozenset[str] = frozenset()


def fit_standardizer(
    X_train: np.ndarray, fitted_subjects: frozenset[str] = frozenset()
) -> StandardizerParams:
    """Per-column mean and population std of the training matrix."""
    X = np.asarray(X_train, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise TrainingError("fit_standardizer", f"need a non-empty 2-D matrix, got {X.shape}")
    return StandardizerParams(
        mean=X.mean(axis=0), std=X.std(axis=0), fitted_subjects=fitted_subjects
    )


def apply_standardizer(x: np.ndarray, params: StandardizerParams) -> np.ndarray:
    """(x - mean) / std, with zero-variance columns mapped to 0."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.mean.size:
        raise TrainingError(
            "apply_standardizer",
            f"dim mismatch: x has {x.shape[-1]}, standardizer has {params.mean.size}",
        )
    safe = np.where(params.std > 0, params.std, 1.0)
    out = (x - params.mean) / safe
    return np.where(params.std > 0, out, 0.0)


def balanced_class_weights(n_case: int, n_control: int) -> tuple[float, float]:
    """Inverse-frequency weights; equal-sized classes give (1.0, 1.0)."""
    n = n_case + n_control
    return (n / (2.0 * n_case), n / (2.0 * n_control))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _check_training_inputs(op: str, X: np.ndarray, y: np.ndarray, classes) -> None:
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.size:
        raise TrainingError(op, f"shape mismatch: X {X.shape}, y {y.shape}")
    if not np.all(np.isfinite(X)):
        raise TrainingError(op, "non-finite values in X")
    present = set(np.unique(y).tolist())
    if not present <= set(classes):
        raise TrainingError(op, f"labels must be in {sorted(classes)}, got {sorted(present)}")
    if len(present) < 2:
        raise TrainingError(op, f"training labels contain a single class: {sorted(present)}")


def logistic_objective_grad(
    X: np.ndarray, y: np.ndarray, cw: np.ndarray, lam: float, w: np.ndarray, b: float
):
    """Weighted-average cross-entropy + L2; returns (J, grad_w, grad_b)."""
    W = cw.sum()
    z = X @ w + b
    # log(1 + e^z) - y*z, computed stably
    losses = np.logaddexp(0.0, z) - y * z
    J = float((cw * losses).sum() / W + 0.5 * lam * (w @ w))
    resid = cw * (_sigmoid(z) - y)
    grad_w = X.T @ resid / W + lam * w
    grad_b = float(resid.sum() / W)
    return J, grad_w, grad_b


def train_logistic(
    X: np.ndarray,
    y: np.ndarray,
    l2_lambda: float = 1.0,
    max_iters: int = 500,
    tol: float = 1e-6,
    class_weights: tuple[float, float] | None = None,
    fitted_subjects: frozenset[str] = frozenset(),
) -> LinearModel:
    """Full-batch gradient descent with Armijo backtracking line search.

    y is {0, 1} with Case = 1.  Stops when the gradient infinity-norm
    drops below tol or after max_iters accepted steps.  The objective is
    asserted non-increasing at every accepted step.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_training_inputs("train_logistic", X, y, (0.0, 1.0))
    if class_weights is None:
        class_weights = balanced_class_weights(int(y.sum()), int((1 - y).sum()))
    cw = np.where(y == 1.0, class_weights[0], class_weights[1])

    w = np.zeros(X.shape[1])
    b = 0.0
    step = 1.0
    J, gw, gb = logistic_objective_grad(X, y, cw, l2_lambda, w, b)
    iters = 0
    converged = False
    for iters in range(1, max_iters + 1):
        gnorm_sq = float(gw @ gw + gb * gb)
        if max(np.max(np.abs(gw)), abs(gb)) < tol:
            converged = True
            iters -= 1
            break
        # backtrack until the Armijo condition holds
        accepted = False
        for _ in range(60):
            w_new = w - step * gw
            b_new = b - step * gb
            J_new, gw_new, gb_new = logistic_objective_grad(
                X, y, cw, l2_lambda, w_new, b_new
            )
            if J_new <= J - 1e-4 * step * gnorm_sq:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True  # no descent possible at float resolution
            iters -= 1
            break
        if J_new > J + 1e-12:
            raise TrainingError(
                "train_logistic", f"objective increased ({J} -> {J_new}) on an accepted step"
            )
        w, b, J, gw, gb = w_new, b_new, J_new, gw_new, gb_new
        step *= 2.0  # optimistic growth, backtracking will trim it

    return LinearModel(
        kind=ModelKind.LOGISTIC_REGRESSION,
        weights=w,
        bias=b,
        l2_lambda=l2_lambda,
        class_weights=class_weights,
        training_meta={"iterations": iters, "final_objective": J, "converged": converged},
        fitted_subjects=fitted_subjects,
    )


def predict_logistic(x: np.ndarray, model: LinearModel):
    """Probability of Case; scalar for a single vector, array for a matrix."""
    if model.kind is not ModelKind.LOGISTIC_REGRESSION:
        raise TrainingError("predict_logistic", f"model kind is {model.kind.value}")
    x = np.asarray(x, dtype=np.float64)
    z = x @ model.weights + model.bias
    p = _sigmoid(np.atleast_1d(z))
    return float(p[0]) if z.ndim == 0 else p


def svm_objective(
    X: np.ndarray, y: np.ndarray, cw: np.ndarray, lam: float, w: np.ndarray, b: float
) -> float:
    """Weighted-average hinge loss + L2 penalty on w."""
    margins = y * (X @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins)
    return float((cw * hinge).sum() / cw.sum() + 0.5 * lam * (w @ w))


def train_linear_svm(
    X: np.ndarray,
    y: np.ndarray,
    l2_lambda: float = 1.0,
    epochs: int = 50,
    seed: int = 0,
    class_weights: tuple[float, float] | None = None,
    fitted_subjects: frozenset[str] = frozenset(),
) -> LinearModel:
    """Pegasos with averaged iterates; y is {-1, +1} with Case = +1.

    Visits epochs*N uniformly sampled (with replacement) training rows;
    the sample index sequence is floor(u_t * N) over seeded uniforms, so
    runs are deterministic given the seed.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_training_inputs("train_linear_svm", X, y, (-1.0, 1.0))
    if l2_lambda <= 0:
        raise TrainingError("train_linear_svm", f"l2_lambda must be > 0, got {l2_lambda}")
    n = X.shape[0]
    if class_weights is None:
        class_weights = balanced_class_weights(int((y > 0).sum()), int((y < 0).sum()))
    cw = np.where(y > 0, class_weights[0], class_weights[1])
    # fold the 1/W normalization into the per-sample weights so the
    # stochastic subgradient is unbiased for the averaged objective
    cw_scaled = cw * (n / cw.sum())

    rng = np.random.default_rng(seed)
    steps = epochs * n
    idx = np.floor(rng.random(steps) * n).astype(np.int64)
    w, b = kernels.pegasos(X, y, cw_scaled, l2_lambda, idx)
    return LinearModel(
        kind=ModelKind.LINEAR_SVM,
        weights=w,
        bias=float(b),
        l2_lambda=l2_lambda,
        class_weights=class_weights,
        training_meta={
            "epochs": epochs,
            "steps": steps,
            "final_objective": svm_objective(X, y, cw, l2_lambda, w, float(b)),
        },
        fitted_subjects=fitted_subjects,
    )


def predict_svm(x: np.ndarray, model: LinearModel):
    """Signed margin; the label is its sign (0 counts as Case)."""
    if model.kind is not ModelKind.LINEAR_SVM:
        raise TrainingError("predict_svm", f"model kind is {model.kind.value}")
    x = np.asarray(x, dtype=np.float64)
    z = x @ model.weights + model.bias
    return float(z) if z.ndim == 0 else z


def decision_score(x: np.ndarray, model: LinearModel):
    """Unified score: positive favors Case.  LR gives p - 0.5, SVM the margin."""
    if model.kind is ModelKind.LOGISTIC_REGRESSION:
        return predict_logistic(x, model) - 0.5
    return predict_svm(x, model)


def save_model(model: LinearModel, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind.value,
        "dim": int(model.weights.size),
        "weights": [float(v) for v in model.weights],
        "bias": float(model.bias),
        "l2_lambda": float(model.l2_lambda),
        "class_weights": [float(model.class_weights[0]), float(model.class_weights[1])],
        "training_meta": dict(model.training_meta),
        "fitted_subjects": sorted(model.fitted_subjects),
    }
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path) -> LinearModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
        if doc["format_version"] != MODEL_FORMAT_VERSION:
            raise TrainingError(
                "load_model", f"unsupported format_version '{doc['format_version']}'"
            )
        weights = np.array(doc["weights"], dtype=np.float64)
        if weights.size != doc["dim"]:
            raise TrainingError("load_model", f"dim mismatch in {path}")
        return LinearModel(
            kind=ModelKind(doc["kind"]),
            weights=weights,
            bias=float(doc["bias"]),
            l2_lambda=float(doc["l2_lambda"]),
            class_weights=(float(doc["class_weights"][0]), float(doc["class_weights"][1])),
            training_meta=doc["training_meta"],
            fitted_subjects=frozenset(doc["fitted_subjects"]),
        )
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise TrainingError("load_model", f"malformed model file {path}: {exc}")
