"""Model registry: train any ``ModelSpec`` kind behind one standardizing wrapper, predict, and serialize to JSON."""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Union

import numpy as np

from domain.config_models import ModelSpec
from errors import ParseError, ValidationError
from learning.linear_svm import DEFAULT_EPOCHS, LinearSvm, train_linear_svm
from learning.random_forest import RandomForest, train_random_forest
from learning.standardizer import Standardizer, apply_standardizer, fit_standardizer
from logging_config import get_logger

LOGGER = get_logger("learning.models")

SCHEMA_VERSION = 1

MODEL_LABELS = {
    "linear_svm": "Linear SVC",
    "random_forest": "Random Forest",
    "rbf_svm": "RBF SVC",
}


@dataclass(frozen=True, eq=False)
class RbfSvm:
    """Kernel machine fitted by scikit-learn, stored as plain arrays."""

    support_vectors: np.ndarray
    dual_coef: np.ndarray
    intercept: float
    gamma: float

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        sq = (
            (X * X).sum(axis=1)[:, None]
            - 2.0 * X @ self.support_vectors.T
            + (self.support_vectors * self.support_vectors).sum(axis=1)[None, :]
        )
        return np.exp(-self.gamma * np.maximum(sq, 0.0)) @ self.dual_coef + self.intercept

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.decision_function(X) > 0).astype(int)

    def to_dict(self) -> dict:
        return {
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "intercept": self.intercept,
            "gamma": self.gamma,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RbfSvm":
        return cls(
            np.atleast_2d(np.asarray(data["support_vectors"], dtype=np.float64)),
            np.asarray(data["dual_coef"], dtype=np.float64),
            float(data["intercept"]),
            float(data["gamma"]),
        )


def train_rbf_svm(X: np.ndarray, y: np.ndarray, C: float = 1.0, gamma: float = 0.1, weights=None) -> RbfSvm:
    from sklearn.svm import SVC

    y = (np.asarray(y) > 0).astype(int)
    model = SVC(kernel="rbf", C=C, gamma=gamma, class_weight=dict(weights) if weights else None)
    model.fit(np.asarray(X, dtype=np.float64), y)
    return RbfSvm(
        np.asarray(model.support_vectors_, dtype=np.float64),
        np.asarray(model.dual_coef_[0], dtype=np.float64),
        float(model.intercept_[0]),
        float(gamma),
    )


Estimator = Union[LinearSvm, RandomForest, RbfSvm]


def _fit_linear_svm(X: np.ndarray, y: np.ndarray, spec: ModelSpec) -> LinearSvm:
    hp = spec.hyperparams
    return train_linear_svm(
        X,
        y,
        C=float(hp.get("C", 1.0)),
        weights=spec.class_weights,
        seed=spec.seed,
        epochs=int(hp.get("epochs", DEFAULT_EPOCHS)),
    )


def _fit_random_forest(X: np.ndarray, y: np.ndarray, spec: ModelSpec) -> RandomForest:
    hp = spec.hyperparams
    depth = hp.get("max_depth")
    return train_random_forest(
        X,
        y,
        n_trees=int(hp.get("n_trees", 100)),
        max_depth=None if depth is None else int(depth),
        min_leaf=int(hp.get("min_leaf", 1)),
        weights=spec.class_weights,
        seed=spec.seed,
        bootstrap=bool(hp.get("bootstrap", True)),
        max_features=hp.get("max_features", -1),
    )


def _fit_rbf_svm(X: np.ndarray, y: np.ndarray, spec: ModelSpec) -> RbfSvm:
    hp = spec.hyperparams
    return train_rbf_svm(X, y, C=float(hp.get("C", 1.0)), gamma=float(hp.get("gamma", 0.1)), weights=spec.class_weights)


TRAINERS: Dict[str, Callable[[np.ndarray, np.ndarray, ModelSpec], Estimator]] = {
    "linear_svm": _fit_linear_svm,
    "random_forest": _fit_random_forest,
    "rbf_svm": _fit_rbf_svm,
}

DECODERS: Dict[str, Callable[[dict], Estimator]] = {
    "linear_svm": LinearSvm.from_dict,
    "random_forest": RandomForest.from_dict,
    "rbf_svm": RbfSvm.from_dict,
}


@dataclass(frozen=True, eq=False)
class TrainedModel:
    spec: ModelSpec
    standardizer: Standardizer
    estimator: Estimator

    @property
    def kind(self) -> str:
        return self.spec.kind

    @property
    def label(self) -> str:
        return MODEL_LABELS[self.spec.kind]


def train_model(spec: ModelSpec, X: np.ndarray, y: np.ndarray) -> TrainedModel:
    X = np.asarray(X, dtype=np.float64)
    if not np.isfinite(X).all():
        raise ValidationError(f"{spec.kind}: training features contain non-finite values")
    stats = fit_standardizer(X)
    estimator = TRAINERS[spec.kind](apply_standardizer(stats, X), np.asarray(y), spec)
    return TrainedModel(spec, stats, estimator)


def decision_scores(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """SVM margins w.x+b (or kernel margins); for a forest, vote share minus one half."""
    return model.estimator.decision_function(apply_standardizer(model.standardizer, X))


def predict(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.standardizer.dim:
        raise ValidationError(f"{model.kind}: expected {model.standardizer.dim} features, got shape {X.shape}")
    return model.estimator.predict(apply_standardizer(model.standardizer, X))


def model_to_dict(model: TrainedModel) -> Dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": model.kind,
        "hyperparams": model.spec.hyperparams,
        "seed": model.spec.seed,
        "class_weights": {str(k): v for k, v in model.spec.class_weights.items()},
        "standardizer": model.standardizer.to_dict(),
        "parameters": model.estimator.to_dict(),
    }


def model_from_dict(data: Dict[str, Any]) -> TrainedModel:
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported model schema version {version!r}")
    kind = data.get("kind")
    if kind not in DECODERS:
        raise ParseError(f"unknown model kind {kind!r}")
    spec = ModelSpec(
        kind=kind,
        hyperparams=dict(data.get("hyperparams", {})),
        seed=int(data.get("seed", 0)),
        class_weights={int(k): float(v) for k, v in data.get("class_weights", {}).items()},
    )
    return TrainedModel(spec, Standardizer.from_dict(data["standardizer"]), DECODERS[kind](data["parameters"]))


def save_model(path: Path, model: TrainedModel) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model_to_dict(model), sort_keys=True), encoding="utf-8")


def load_model(path: Path) -> TrainedModel:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: unreadable model ({exc})") from exc
    return model_from_dict(data)
