"""Class weights that make each class contribute equally to the training loss."""

from typing import Dict, Mapping, Optional

import numpy as np

from errors import DomainError


def balanced_weights(labels) -> Dict[int, float]:
    """w_c = N / (K * N_c) over the K classes present."""
    labels = np.asarray(labels).astype(int)
    classes, counts = np.unique(labels, return_counts=True)
    if classes.shape[0] < 2:
        raise DomainError(f"balanced weights need at least two classes, got {classes.tolist()}")
    n, k = labels.shape[0], classes.shape[0]
    return {int(c): n / (k * int(m)) for c, m in zip(classes, counts)}


def sample_weights(labels, weights: Optional[Mapping[int, float]] = None) -> np.ndarray:
    labels = np.asarray(labels).astype(int)
    if not weights:
        return np.ones(labels.shape[0])
    return np.array([weights.get(int(y), 1.0) for y in labels], dtype=np.float64)
