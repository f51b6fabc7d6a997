"""Soft-margin linear SVM trained by mini-batch subgradient descent.

Each epoch walks the samples in a fresh order drawn from ``seed``, so a seed
fixes the whole training run.

The loss is rescaled to  lambda/2 ||w||^2 + (1/S) sum_i s_i hinge_i  with
S = sum_i s_i and lambda = 1 / (C S), which has the same minimiser as
1/2 ||w||^2 + C sum_i s_i hinge_i. The returned model is the running average
of the iterates over every step.
"""

from dataclasses import dataclass
from typing import Mapping, Optional, Tuple

import numpy as np

from errors import ValidationError
from learning.weights import sample_weights
from logging_config import get_logger

LOGGER = get_logger("learning.linear_svm")

DEFAULT_EPOCHS = 300
DEFAULT_BATCH = 64
ETA0 = 0.1


@dataclass(frozen=True, eq=False)
class LinearSvm:
    w: np.ndarray
    b: float
    # objective of the averaged iterate after each epoch
    objective: Tuple[float, ...] = ()

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.w + self.b

    def predict(self, X: np.ndarray) -> np.ndarray:
        # A score of exactly 0 falls to class 0.
        return (self.decision_function(X) > 0).astype(int)

    def to_dict(self) -> dict:
        return {"w": self.w.tolist(), "b": self.b, "objective": list(self.objective)}

    @classmethod
    def from_dict(cls, data: dict) -> "LinearSvm":
        return cls(np.asarray(data["w"], dtype=np.float64), float(data["b"]), tuple(data.get("objective", ())))


def svm_objective(w: np.ndarray, b: float, X: np.ndarray, signs: np.ndarray, sw: np.ndarray, lam: float) -> float:
    margins = signs * (X @ w + b)
    return float(0.5 * lam * w @ w + (sw * np.maximum(0.0, 1.0 - margins)).sum() / sw.sum())


def train_linear_svm(
    X: np.ndarray,
    y: np.ndarray,
    C: float = 1.0,
    weights: Optional[Mapping[int, float]] = None,
    seed: int = 0,
    epochs: int = DEFAULT_EPOCHS,
    eta0: float = ETA0,
    batch_size: int = DEFAULT_BATCH,
) -> LinearSvm:
    """``y`` holds 0/1 or -1/+1 labels; positives are ``y > 0``. ``seed`` drives the per-epoch shuffle."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if not np.isfinite(X).all():
        raise ValidationError("linear SVM input contains non-finite features")
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValidationError(f"X shape {X.shape} does not match {y.shape[0]} labels")
    if C <= 0:
        raise ValidationError(f"C must be positive, got {C}")
    if batch_size < 1:
        raise ValidationError(f"batch_size must be >= 1, got {batch_size}")
    labels01 = (y > 0).astype(int)
    signs = np.where(labels01 == 1, 1.0, -1.0)
    sw = sample_weights(labels01, weights)
    total = sw.sum()
    lam = 1.0 / (C * total)

    w = np.zeros(X.shape[1])
    b = 0.0
    w_avg = np.zeros_like(w)
    b_avg = 0.0
    trace = []
    rng = np.random.default_rng(seed)
    n = X.shape[0]
    step = 0
    for epoch in range(1, epochs + 1):
        eta = eta0 / np.sqrt(epoch)
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            Xb = X[idx]
            active = signs[idx] * (Xb @ w + b) < 1.0
            # Rescaled so the batch estimate is unbiased for the full hinge term.
            coef = np.where(active, sw[idx] * signs[idx], 0.0) * (n / (idx.size * total))
            w = w - eta * (lam * w - coef @ Xb)
            b = b + eta * coef.sum()
            step += 1
            w_avg += (w - w_avg) / step
            b_avg += (b - b_avg) / step
        trace.append(svm_objective(w_avg, b_avg, X, signs, sw, lam))
    LOGGER.debug("linear svm C=%g: objective %.4f -> %.4f over %d epochs", C, trace[0], trace[-1], epochs)
    return LinearSvm(w_avg, float(b_avg), tuple(trace))
