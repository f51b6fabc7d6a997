import numpy as np

from errors import DomainError


def confusion(y_true, y_pred) -> np.ndarray:
    """2x2 counts, rows = true class, columns = predicted class (0 = negative/low)."""
    y_true = np.asarray(y_true).astype(int)
    y_pred = np.asarray(y_pred).astype(int)
    if y_true.shape != y_pred.shape:
        raise DomainError(f"label shapes differ: {y_true.shape} vs {y_pred.shape}")
    for name, values in (("true", y_true), ("predicted", y_pred)):
        stray = np.setdiff1d(values, (0, 1))
        if stray.size:
            raise DomainError(f"{name} labels outside {{0, 1}}: {stray.tolist()}")
    cm = np.zeros((2, 2), dtype=np.int64)
    np.add.at(cm, (y_true, y_pred), 1)
    return cm


def recalls(cm) -> np.ndarray:
    cm = np.asarray(cm, dtype=np.float64)
    rows = cm.sum(axis=1)
    if (rows <= 0).any():
        empty = [int(i) for i in np.nonzero(rows <= 0)[0]]
        raise DomainError(f"confusion matrix has empty class rows {empty}")
    return np.diag(cm) / rows


def uar(cm) -> float:
    """Unweighted average recall (balanced accuracy) over both classes."""
    return float(recalls(cm).mean())
