"""Random forest of class-weighted Gini CART trees for binary labels."""

import math
from dataclasses import dataclass
from typing import List, Mapping, Optional, Tuple

import numpy as np

from errors import ValidationError
from learning.weights import sample_weights
from logging_config import get_logger

LOGGER = get_logger("learning.random_forest")

LEAF = -1


def gini(class_weight: np.ndarray) -> float:
    """1 - sum p_c^2 over (weighted) class totals."""
    class_weight = np.asarray(class_weight, dtype=np.float64)
    total = class_weight.sum()
    if total <= 0:
        return 0.0
    p = class_weight / total
    return float(1.0 - (p * p).sum())


@dataclass(frozen=True, eq=False)
class DecisionTree:
    """Flattened tree; node 0 is the root and leaves have ``feature == -1``."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            inner = self.feature[node] != LEAF
            if not inner.any():
                break
            idx = np.nonzero(inner)[0]
            f = self.feature[node[idx]]
            go_left = X[idx, f] <= self.threshold[node[idx]]
            node[idx] = np.where(go_left, self.left[node[idx]], self.right[node[idx]])
        return self.value[node].astype(int)

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecisionTree":
        return cls(
            np.asarray(data["feature"], dtype=np.int64),
            np.asarray(data["threshold"], dtype=np.float64),
            np.asarray(data["left"], dtype=np.int64),
            np.asarray(data["right"], dtype=np.int64),
            np.asarray(data["value"], dtype=np.int64),
        )


def best_split(
    X: np.ndarray,
    y: np.ndarray,
    sw: np.ndarray,
    features: np.ndarray,
    min_leaf: int = 1,
) -> Optional[Tuple[int, float, float]]:
    """Lowest weighted child Gini over ``features`` as (feature, threshold, impurity).

    Thresholds are midpoints between consecutive distinct values. Ties go to
    the lower feature index, then the lower threshold.
    """
    n = X.shape[0]
    if n < 2 * min_leaf:
        return None
    features = np.sort(np.asarray(features, dtype=np.int64))
    cols = X[:, features]
    order = np.argsort(cols, axis=0, kind="mergesort")
    sorted_x = np.take_along_axis(cols, order, axis=0)
    w_pos = np.where(y == 1, sw, 0.0)[order]
    w_all = sw[order]
    left_pos = np.cumsum(w_pos, axis=0)[:-1]
    left_all = np.cumsum(w_all, axis=0)[:-1]
    total_pos = w_pos.sum(axis=0)
    total = w_all.sum(axis=0)
    right_pos = total_pos - left_pos
    right_all = total - left_all

    with np.errstate(divide="ignore", invalid="ignore"):
        p_left = np.where(left_all > 0, left_pos / left_all, 0.0)
        p_right = np.where(right_all > 0, right_pos / right_all, 0.0)
    gini_left = 2.0 * p_left * (1.0 - p_left)
    gini_right = 2.0 * p_right * (1.0 - p_right)
    impurity = (left_all * gini_left + right_all * gini_right) / total

    rank = np.arange(1, n)[:, None]
    valid = (sorted_x[1:] > sorted_x[:-1]) & (rank >= min_leaf) & (n - rank >= min_leaf)
    if not valid.any():
        return None
    impurity = np.where(valid, impurity, np.inf)
    # Column-major argmin walks features first, then thresholds in ascending order.
    flat = int(np.argmin(impurity.T))
    col, row = divmod(flat, n - 1)
    threshold = 0.5 * (sorted_x[row, col] + sorted_x[row + 1, col])
    return int(features[col]), float(threshold), float(impurity[row, col])


def _leaf_value(y: np.ndarray, sw: np.ndarray) -> int:
    pos = sw[y == 1].sum()
    neg = sw[y == 0].sum()
    return 1 if pos > neg else 0


def build_tree(
    X: np.ndarray,
    y: np.ndarray,
    sw: np.ndarray,
    rng: np.random.Generator,
    max_depth: Optional[int] = None,
    min_leaf: int = 1,
    max_features: Optional[int] = None,
) -> DecisionTree:
    d = X.shape[1]
    n_candidates = d if max_features is None else max(1, min(d, max_features))
    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []
    value: List[int] = []

    def new_node() -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(0)
        return len(feature) - 1

    stack = [(new_node(), np.arange(X.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        y_node, w_node = y[idx], sw[idx]
        value[node] = _leaf_value(y_node, w_node)
        parent = gini(np.array([w_node[y_node == 0].sum(), w_node[y_node == 1].sum()]))
        if parent <= 0.0 or (max_depth is not None and depth >= max_depth):
            continue
        if n_candidates < d:
            candidates = rng.choice(d, size=n_candidates, replace=False)
        else:
            candidates = np.arange(d)
        split = best_split(X[idx], y_node, w_node, candidates, min_leaf)
        if split is None or split[2] >= parent - 1e-12:
            continue
        f, thr, _ = split
        go_left = X[idx, f] <= thr
        feature[node], threshold[node] = f, thr
        left[node], right[node] = new_node(), new_node()
        # Right pushed first so the left subtree is numbered first.
        stack.append((right[node], idx[~go_left], depth + 1))
        stack.append((left[node], idx[go_left], depth + 1))

    return DecisionTree(
        np.asarray(feature, dtype=np.int64),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.asarray(value, dtype=np.int64),
    )


@dataclass(frozen=True, eq=False)
class RandomForest:
    trees: Tuple[DecisionTree, ...]

    def votes(self, X: np.ndarray) -> np.ndarray:
        """Fraction of trees voting for class 1."""
        return np.mean([tree.predict(X) for tree in self.trees], axis=0)

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return self.votes(X) - 0.5

    def predict(self, X: np.ndarray) -> np.ndarray:
        # An even split of votes falls to class 0.
        return (self.votes(X) > 0.5).astype(int)

    def to_dict(self) -> dict:
        return {"trees": [tree.to_dict() for tree in self.trees]}

    @classmethod
    def from_dict(cls, data: dict) -> "RandomForest":
        return cls(tuple(DecisionTree.from_dict(t) for t in data["trees"]))


def sqrt_features(d: int) -> int:
    return int(math.ceil(math.sqrt(d)))


def train_random_forest(
    X: np.ndarray,
    y: np.ndarray,
    n_trees: int = 100,
    max_depth: Optional[int] = None,
    min_leaf: int = 1,
    weights: Optional[Mapping[int, float]] = None,
    seed: int = 0,
    bootstrap: bool = True,
    max_features: Optional[int] = -1,
) -> RandomForest:
    """``max_features=-1`` draws ceil(sqrt(d)) candidates per split; ``None`` uses every feature."""
    X = np.asarray(X, dtype=np.float64)
    y = (np.asarray(y) > 0).astype(int)
    if not np.isfinite(X).all():
        raise ValidationError("random forest input contains non-finite features")
    if n_trees < 1:
        raise ValidationError("n_trees must be >= 1")
    if max_features == -1:
        max_features = sqrt_features(X.shape[1])
    sw = sample_weights(y, weights)
    trees = []
    for k in range(n_trees):
        rng = np.random.default_rng([seed, k])
        idx = rng.integers(0, X.shape[0], X.shape[0]) if bootstrap else np.arange(X.shape[0])
        trees.append(build_tree(X[idx], y[idx], sw[idx], rng, max_depth, min_leaf, max_features))
    LOGGER.debug("random forest: %d trees, mean %.1f nodes", n_trees, np.mean([t.n_nodes for t in trees]))
    return RandomForest(tuple(trees))
