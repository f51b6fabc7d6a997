"""Outer cross-validation with pooled test predictions."""

from dataclasses import dataclass, field
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from domain.models import DatasetSample, Modality
from errors import DyadError, StageError, ValidationError
from evaluation.folds import FoldPlan
from evaluation.metrics import confusion, uar
from evaluation.tuning import Hyperparams, fit_weighted, inner_tune
from features.fusion import fuse
from learning.models import MODEL_LABELS, predict
from logging_config import get_logger

LOGGER = get_logger("evaluation.cv")


@dataclass(frozen=True)
class FoldOutcome:
    fold: int
    train_couples: Tuple[int, ...]
    test_couples: Tuple[int, ...]
    hyperparams: Dict[str, Any]
    n_test: int


@dataclass(frozen=True, eq=False)
class EvalReport:
    target: str
    gender: str
    modalities: Tuple[Modality, ...]
    model: str
    confusion: np.ndarray
    uar: float
    folds: Tuple[FoldOutcome, ...] = field(default_factory=tuple)

    @property
    def n_samples(self) -> int:
        return int(self.confusion.sum())

    @property
    def model_label(self) -> str:
        return MODEL_LABELS[self.model]

    @property
    def fold_hyperparams(self) -> Tuple[Dict[str, Any], ...]:
        return tuple(f.hyperparams for f in self.folds)


def design_matrix(samples: Sequence[DatasetSample], modalities: Sequence[Modality]) -> np.ndarray:
    """Fused feature rows for ``modalities`` in canonical order."""
    rows = []
    for sample in samples:
        missing = [m.value for m in modalities if m not in sample.features]
        if missing:
            raise ValidationError(f"{sample.session_id}: missing {','.join(missing)} features")
        rows.append(fuse([sample.features[m] for m in modalities]).values)
    if not rows:
        raise ValidationError("no samples to build a design matrix from")
    dims = {row.shape[0] for row in rows}
    if len(dims) != 1:
        raise ValidationError(f"feature dimensions differ across samples: {sorted(dims)}")
    return np.vstack(rows)


def run_cv_arrays(
    X: np.ndarray,
    y: np.ndarray,
    couple_ids: Sequence[int],
    kind: str,
    grid: Sequence[Hyperparams],
    plan: FoldPlan,
    seed: int = 0,
    inner_folds: int = 2,
) -> Tuple[np.ndarray, Tuple[FoldOutcome, ...]]:
    """Pooled out-of-fold predictions and the per-fold record."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y).astype(int)
    couple_ids = np.asarray(couple_ids).astype(int)
    y_pred = np.full(y.shape[0], -1, dtype=np.int64)
    outcomes = []
    for fold, (train_idx, test_idx) in enumerate(plan.splits(couple_ids)):
        if test_idx.size == 0:
            continue
        try:
            best, _ = inner_tune(X[train_idx], y[train_idx], couple_ids[train_idx], kind, grid, seed, inner_folds)
            model = fit_weighted(kind, best, X[train_idx], y[train_idx], seed)
            y_pred[test_idx] = predict(model, X[test_idx])
        except DyadError as exc:
            raise StageError(f"evaluate {plan.target} {kind} fold {fold}", cause=exc) from exc
        outcomes.append(
            FoldOutcome(
                fold=fold,
                train_couples=tuple(sorted(set(couple_ids[train_idx].tolist()))),
                test_couples=tuple(sorted(set(couple_ids[test_idx].tolist()))),
                hyperparams=best,
                n_test=int(test_idx.size),
            )
        )
    missing = np.flatnonzero(y_pred < 0)
    if missing.size:
        lost = sorted(set(couple_ids[missing].tolist()))
        raise StageError(
            f"evaluate {plan.target} {kind}",
            cause=ValidationError(f"{missing.size} samples never predicted, couples {lost} sit in no test fold"),
        )
    return y_pred, tuple(outcomes)


def run_cv(
    samples: Sequence[DatasetSample],
    kind: str,
    grid: Sequence[Hyperparams],
    plan: FoldPlan,
    modalities: Sequence[Modality],
    seed: int = 0,
    gender: str = "all",
    inner_folds: int = 2,
) -> EvalReport:
    X = design_matrix(samples, modalities)
    y = np.array([s.label.binary(plan.target) for s in samples], dtype=np.int64)
    couple_ids = [s.couple_id for s in samples]
    y_pred, outcomes = run_cv_arrays(X, y, couple_ids, kind, grid, plan, seed, inner_folds)
    cm = confusion(y, y_pred)
    report = EvalReport(plan.target, gender, tuple(modalities), kind, cm, uar(cm), outcomes)
    LOGGER.info(
        "%s %s %s %s: UAR %.3f over %d samples",
        gender,
        plan.target,
        "+".join(m.value for m in modalities),
        kind,
        report.uar,
        report.n_samples,
    )
    return report
