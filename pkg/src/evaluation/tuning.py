"""Inner hyperparameter search on a training split."""

from itertools import product
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from domain.config_models import ModelSpec, PipelineConfig
from errors import DomainError, StratificationError
from evaluation.folds import assign_folds
from evaluation.metrics import confusion, uar
from learning.models import predict, train_model
from learning.weights import balanced_weights
from logging_config import get_logger

LOGGER = get_logger("evaluation.tuning")

Hyperparams = Dict[str, Any]


def expand_grid(kind: str, config: PipelineConfig) -> List[Hyperparams]:
    """Grid cells for one model kind in canonical order (earlier cells win ties)."""
    if kind == "linear_svm":
        return [{"C": c, "epochs": config.svm_epochs} for c in config.grid_svm_c]
    if kind == "random_forest":
        return [
            {"n_trees": n, "max_depth": depth, "min_leaf": config.rf_min_leaf}
            for n, depth in product(config.grid_rf_n_trees, config.grid_rf_max_depth)
        ]
    if kind == "rbf_svm":
        return [{"C": c, "gamma": g} for c, g in product(config.grid_svm_c, config.grid_rbf_gamma)]
    raise DomainError(f"unknown model kind {kind!r}")


def fit_weighted(kind: str, hyperparams: Hyperparams, X: np.ndarray, y: np.ndarray, seed: int):
    spec = ModelSpec(kind=kind, hyperparams=dict(hyperparams), seed=seed, class_weights=balanced_weights(y))
    return train_model(spec, X, y)


def inner_tune(
    X: np.ndarray,
    y: np.ndarray,
    couple_ids: Sequence[int],
    kind: str,
    grid: Sequence[Hyperparams],
    seed: int = 0,
    inner_folds: int = 2,
) -> Tuple[Hyperparams, List[float]]:
    """Pick the grid cell with the best pooled UAR over couple-disjoint inner folds.

    Returns the winner and the per-cell scores (empty when no search ran).
    """
    if not grid:
        raise DomainError(f"{kind}: empty hyperparameter grid")
    if len(grid) == 1:
        return dict(grid[0]), []
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y).astype(int)
    couple_ids = np.asarray(couple_ids).astype(int)
    try:
        plan = assign_folds(couple_ids, y, inner_folds, "inner", seed)
    except StratificationError as exc:
        LOGGER.warning("%s: inner split infeasible (%s); using first grid cell", kind, exc)
        return dict(grid[0]), []

    splits = plan.splits(couple_ids)
    scores: List[float] = []
    for hyperparams in grid:
        y_pred = np.zeros_like(y)
        for train_idx, test_idx in splits:
            model = fit_weighted(kind, hyperparams, X[train_idx], y[train_idx], seed)
            y_pred[test_idx] = predict(model, X[test_idx])
        scores.append(uar(confusion(y, y_pred)))
    best = int(np.argmax(scores))  # first maximum wins
    LOGGER.debug("%s inner scores %s -> %s", kind, [round(s, 4) for s in scores], grid[best])
    return dict(grid[best]), scores
