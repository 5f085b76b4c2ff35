from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit as sigmoid

from ..dataset import ATTRIBUTES, Release

MAX_ITER = 500
GRAD_TOL = 1e-6
REPORT_EPS = 1e-3


def log_loss(w: np.ndarray, A: np.ndarray, y: np.ndarray) -> float:
    z = A @ w
    # log(1 + e^z) - y z, written to avoid overflow
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


@dataclass(frozen=True)
class LogisticModel:
    """g = 1 / (1 + exp(-(b0 + sum_i b_i * z_i))) over standardized inputs z."""

    coef: np.ndarray
    mean: np.ndarray
    scale: np.ndarray
    losses: tuple[float, ...] = field(default=(), compare=False)

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        Z = (np.asarray(X, dtype=float) - self.mean) / self.scale
        return sigmoid(self.coef[0] + Z @ self.coef[1:])

    def features_used(self) -> set[str]:
        return {a for a, b in zip(ATTRIBUTES, self.coef[1:]) if abs(b) > REPORT_EPS}

    def to_dict(self) -> dict:
        return {"intercept": float(self.coef[0]),
                "coef": {a: float(b) for a, b in zip(ATTRIBUTES, self.coef[1:])},
                "mean": [float(m) for m in self.mean], "scale": [float(s) for s in self.scale]}


def fit_logistic(data: Release, max_iter: int = MAX_ITER, tol: float = GRAD_TOL) -> LogisticModel:
    """Unregularised batch gradient descent on the mean log loss.

    The step is 1/L with L = lambda_max(A^T A) / (4 n), the Lipschitz
    constant of the gradient, so the loss never increases.
    """
    X = data.X
    y = data.labels.astype(float)
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    A = np.hstack([np.ones((len(X), 1)), (X - mean) / scale])
    n = len(A)
    lipschitz = np.linalg.eigvalsh(A.T @ A / n)[-1] / 4.0
    step = 1.0 / lipschitz
    w = np.zeros(A.shape[1])
    losses = [log_loss(w, A, y)]
    for _ in range(max_iter):
        grad = A.T @ (sigmoid(A @ w) - y) / n
        if np.linalg.norm(grad) < tol:
            break
        w = w - step * grad
        losses.append(log_loss(w, A, y))
    return LogisticModel(w, mean, scale, tuple(losses))
