from dataclasses import dataclass

import numpy as np

from errors import ValidationError

SIGMA_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.mean.shape[0])

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Standardizer":
        return cls(np.asarray(data["mean"], dtype=np.float64), np.asarray(data["std"], dtype=np.float64))


def fit_standardizer(X: np.ndarray) -> Standardizer:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValidationError(f"expected a non-empty 2-D matrix, got shape {X.shape}")
    return Standardizer(X.mean(axis=0), X.std(axis=0))


def apply_standardizer(stats: Standardizer, X: np.ndarray) -> np.ndarray:
    """Scale with training statistics; columns that were constant in training map to 0."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != stats.dim:
        raise ValidationError(f"expected {stats.dim} columns, got shape {X.shape}")
    constant = stats.std < SIGMA_FLOOR
    out = (X - stats.mean) / np.where(constant, 1.0, stats.std)
    out[:, constant] = 0.0
    return out
