"""Modality grid: every modality set x target x model kind, best model per cell."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from domain.config_models import PipelineConfig
from domain.models import DatasetSample, Modality
from errors import DomainError
from evaluation.cv import EvalReport, run_cv
from evaluation.folds import FoldPlan, make_couple_folds
from evaluation.tuning import expand_grid
from logging_config import get_logger

LOGGER = get_logger("evaluation.grid")

TARGETS = ("arousal", "valence")

# name -> (modalities, table row label)
MODALITY_SETS: Dict[str, Tuple[Tuple[Modality, ...], str]] = {
    "physio": ((Modality.PHYSIO,), "Physiological"),
    "movement": ((Modality.MOVEMENT,), "Movement"),
    "acoustic": ((Modality.ACOUSTIC,), "Acoustic"),
    "linguistic": ((Modality.LINGUISTIC,), "Linguistic"),
    "physio_movement": ((Modality.PHYSIO, Modality.MOVEMENT), "Physiological and Movement"),
    "linguistic_acoustic": ((Modality.ACOUSTIC, Modality.LINGUISTIC), "Linguistic and Acoustic"),
    "all": (
        (Modality.PHYSIO, Modality.MOVEMENT, Modality.ACOUSTIC, Modality.LINGUISTIC),
        "Physiological, Movement, Linguistic and Acoustic",
    ),
}


@dataclass(frozen=True, eq=False)
class GridCell:
    gender: str
    target: str
    modality_set: str
    reports: Tuple[EvalReport, ...] = field(default_factory=tuple)
    absent: str = ""

    @property
    def best(self) -> Optional[EvalReport]:
        """Highest UAR; ties keep the earlier model kind."""
        best = None
        for report in self.reports:
            if best is None or report.uar > best.uar:
                best = report
        return best

    @property
    def key(self) -> str:
        return f"{self.gender}_{self.target}_{self.modality_set}"


def resolve_modality_sets(names: Optional[Sequence[str]] = None) -> List[str]:
    if not names:
        return list(MODALITY_SETS)
    unknown = [n for n in names if n not in MODALITY_SETS]
    if unknown:
        raise DomainError(f"unknown modality sets {unknown}; choose from {list(MODALITY_SETS)}")
    return [n for n in MODALITY_SETS if n in names]


def _missing(samples: Sequence[DatasetSample], modalities: Sequence[Modality]) -> str:
    for modality in modalities:
        lacking = sum(1 for s in samples if modality not in s.features)
        if lacking:
            return f"{modality.value} missing for {lacking} samples"
    return ""


def modality_grid(
    samples: Sequence[DatasetSample],
    gender: str,
    config: PipelineConfig,
    targets: Sequence[str] = TARGETS,
    modality_sets: Optional[Sequence[str]] = None,
    jobs: int = 1,
) -> List[GridCell]:
    """Cells in (target, modality set) order; each holds one report per model kind."""
    samples = list(samples)
    set_names = resolve_modality_sets(modality_sets)
    plans: Dict[str, FoldPlan] = {t: make_couple_folds(samples, config.folds, t, config.seed) for t in targets}
    grids = {kind: expand_grid(kind, config) for kind in config.models}

    tasks = []
    absent: Dict[Tuple[str, str], str] = {}
    for target in targets:
        for name in set_names:
            modalities = MODALITY_SETS[name][0]
            reason = _missing(samples, modalities)
            if reason:
                absent[(target, name)] = reason
                LOGGER.warning("%s %s %s absent: %s", gender, target, name, reason)
                continue
            for kind in config.models:
                tasks.append((target, name, kind))

    def evaluate(task):
        target, name, kind = task
        return run_cv(
            samples,
            kind,
            grids[kind],
            plans[target],
            MODALITY_SETS[name][0],
            seed=config.seed,
            gender=gender,
            inner_folds=config.inner_folds,
        )

    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(evaluate, tasks))
    else:
        results = [evaluate(task) for task in tasks]

    by_cell: Dict[Tuple[str, str], List[EvalReport]] = {}
    for (target, name, _), report in zip(tasks, results):
        by_cell.setdefault((target, name), []).append(report)

    cells = []
    for target in targets:
        for name in set_names:
            if (target, name) in absent:
                cells.append(GridCell(gender, target, name, absent=absent[(target, name)]))
            else:
                cells.append(GridCell(gender, target, name, tuple(by_cell[(target, name)])))
    return cells
