"""Couple-disjoint stratified fold assignment.

Couples are placed whole, so no couple ever contributes samples to both the
train and test side of a split. Couples carrying the most minority-class
samples are placed first, one per fold per round, each into the open fold
whose positive rate ends up closest to the corpus-wide positive rate.
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from domain.models import DatasetSample
from errors import StratificationError
from logging_config import get_logger

LOGGER = get_logger("evaluation.folds")


@dataclass(frozen=True)
class FoldPlan:
    k: int
    target: str
    assignment: Dict[int, int]
    # (negative/low, positive/high) sample counts per fold
    class_counts: Tuple[Tuple[int, int], ...]

    def couples_in(self, fold: int) -> Tuple[int, ...]:
        return tuple(sorted(c for c, f in self.assignment.items() if f == fold))

    def test_mask(self, couple_ids: Sequence[int], fold: int) -> np.ndarray:
        return np.array([self.assignment[int(c)] == fold for c in couple_ids], dtype=bool)

    def splits(self, couple_ids: Sequence[int]) -> List[Tuple[np.ndarray, np.ndarray]]:
        """(train indices, test indices) per fold, in fold order."""
        out = []
        for fold in range(self.k):
            mask = self.test_mask(couple_ids, fold)
            out.append((np.nonzero(~mask)[0], np.nonzero(mask)[0]))
        return out


def _deviation(fold_counts: np.ndarray, global_rate: float) -> float:
    """Distance of one fold's positive rate from the corpus-wide positive rate."""
    size = int(fold_counts.sum())
    if size == 0:
        return 0.0
    return abs(float(fold_counts[1]) / size - global_rate)


def _repair(counts: np.ndarray, assignment: Dict[int, int], per_couple: Dict[int, np.ndarray], target: str) -> None:
    """Move couples until every fold holds both classes, or give up."""
    k = counts.shape[0]
    for _ in range(len(assignment) * k):
        lacking = [(f, c) for f in range(k) for c in (0, 1) if counts[f, c] == 0]
        if not lacking:
            return
        fold, cls = lacking[0]
        donors = []
        for couple, src in assignment.items():
            own = per_couple[couple]
            if src == fold or own[cls] == 0:
                continue
            remaining = counts[src] - own
            if (remaining > 0).all():
                donors.append((int(own[cls]), couple))
        if not donors:
            break
        _, couple = min(donors)
        src = assignment[couple]
        counts[src] -= per_couple[couple]
        counts[fold] += per_couple[couple]
        assignment[couple] = fold
    raise StratificationError(
        f"cannot give every fold both {target} classes with couple-disjoint folds",
        target=target,
    )


def assign_folds(couple_ids, labels, k: int, target: str, seed: int = 0) -> FoldPlan:
    couple_ids = np.asarray(couple_ids).astype(int)
    labels = np.asarray(labels).astype(int)
    couples = sorted(set(couple_ids.tolist()))
    if len(couples) < k:
        raise StratificationError(f"{target}: {len(couples)} couples cannot fill {k} folds", target=target)
    totals = np.array([(labels == 0).sum(), (labels == 1).sum()], dtype=np.int64)
    minority = int(np.argmin(totals))  # ties pick class 0
    if totals[minority] < k:
        raise StratificationError(
            f"{target}: only {int(totals[minority])} minority samples for {k} folds",
            target=target,
        )

    per_couple = {
        c: np.array([((couple_ids == c) & (labels == 0)).sum(), ((couple_ids == c) & (labels == 1)).sum()], dtype=np.int64)
        for c in couples
    }
    tiebreak = dict(zip(couples, np.random.default_rng(seed).permutation(len(couples)).tolist()))
    order = sorted(couples, key=lambda c: (-per_couple[c][minority], -per_couple[c].sum(), tiebreak[c]))

    global_rate = float(totals[1] / totals.sum())
    counts = np.zeros((k, 2), dtype=np.int64)
    members = np.zeros(k, dtype=np.int64)
    assignment: Dict[int, int] = {}
    for couple in order:
        # Folds fill a couple at a time; within a round the ratio decides.
        open_folds = np.flatnonzero(members == members.min()).tolist()
        fold = min(
            open_folds,
            key=lambda f: (_deviation(counts[f] + per_couple[couple], global_rate), int(counts[f].sum()), f),
        )
        counts[fold] += per_couple[couple]
        members[fold] += 1
        assignment[couple] = fold

    _repair(counts, assignment, per_couple, target)
    plan = FoldPlan(k, target, assignment, tuple((int(a), int(b)) for a, b in counts))
    LOGGER.debug("%s folds: %s", target, plan.class_counts)
    return plan


def make_couple_folds(samples: Sequence[DatasetSample], k: int, target: str, seed: int = 0) -> FoldPlan:
    couple_ids = [s.couple_id for s in samples]
    labels = [s.label.binary(target) for s in samples]
    return assign_folds(couple_ids, labels, k, target, seed)
