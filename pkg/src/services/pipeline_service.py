from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from domain.config_models import PipelineConfig
from domain.models import MODALITY_ORDER, DatasetSample, FeatureVector, Modality, RecordingSession
from errors import DyadError, StageError, ValidationError
from evaluation.grid import TARGETS, GridCell, modality_grid
from evaluation.reporting import write_grid_report
from features.acoustic import gemaps_lite, partner_speech_slices
from features.ingest import IngestReport, ingest_acoustic, ingest_embeddings, ingest_feature_file, write_feature_file
from features.linguistic import hashed_text_features, linguistic_document
from features.stats import movement_features, physio_features
from infrastructure.corpus_repository import Corpus, CorpusRepository
from logging_config import get_logger, write_json_atomic
from preprocessing import CheckOutcome, PreprocessedSession, preprocess_session
from selection import SelectionResult, select_samples, split_by_gender
from services.metrics_service import MetricsCollector

LOGGER = get_logger("pipeline_service")

GENDER_CHOICES = ("male", "female")


@dataclass(frozen=True)
class Unusable:
    session_id: str
    stage: str
    reason: str


@dataclass
class ExtractionResult:
    samples: List[DatasetSample] = field(default_factory=list)
    outcomes: List[CheckOutcome] = field(default_factory=list)
    unusable: List[Unusable] = field(default_factory=list)


@dataclass
class PipelineResult:
    selection: SelectionResult
    extraction: ExtractionResult
    cells: List[GridCell] = field(default_factory=list)
    written: List[Path] = field(default_factory=list)


def _parse_mode(value: str) -> Tuple[str, str]:
    kind, _, arg = value.partition(":")
    return kind, arg


def feature_table_path(out_dir: Path, modality: Modality) -> Path:
    return out_dir / "features" / f"features_{modality.value}.csv"


@dataclass
class PipelineService:
    """Selection, preprocessing, feature extraction and the modality grid over one corpus."""

    repository: CorpusRepository
    config: PipelineConfig
    jobs: int = 1
    metrics_collector: MetricsCollector = field(default_factory=MetricsCollector)
    preprocess_fn: Callable[..., PreprocessedSession] = preprocess_session

    _acoustic_ingest: Optional[IngestReport] = field(default=None, init=False, repr=False)
    _linguistic_ingest: Optional[IngestReport] = field(default=None, init=False, repr=False)

    # -- selection ---------------------------------------------------------
    def select(self, corpus: Corpus) -> SelectionResult:
        with self.metrics_collector.timed("select"):
            result = select_samples(corpus.sessions, corpus.reports, corpus.codes, corpus.schedules)
        self.metrics_collector.sessions_seen = len(corpus.sessions)
        self.metrics_collector.retained = len(result.samples)
        self.metrics_collector.rejected = len(result.rejections)
        return result

    # -- per-session work --------------------------------------------------
    def _map(self, fn, items: Sequence[Any]) -> List[Any]:
        if self.jobs > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                return list(pool.map(fn, items))
        return [fn(item) for item in items]

    def _load_ingest(self, known: Sequence[str]) -> None:
        kind, arg = _parse_mode(self.config.acoustic)
        if kind == "ingest" and self._acoustic_ingest is None:
            self._acoustic_ingest = ingest_acoustic(Path(arg), known)
        kind, arg = _parse_mode(self.config.linguistic)
        if kind == "ingest" and self._linguistic_ingest is None:
            self._linguistic_ingest = ingest_embeddings(Path(arg), known)

    def preprocess_one(self, session: RecordingSession, with_audio: bool = True) -> PreprocessedSession:
        try:
            loaded = self.repository.load_signals(session, with_audio=with_audio)
            return self.preprocess_fn(
                loaded,
                lowpass_cutoff_hz=self.config.lowpass_cutoff_hz,
            )
        except (DyadError, OSError, ValueError) as exc:
            raise StageError("preprocess", session.session_id, exc) from exc

    def _acoustic(self, sample: DatasetSample, pre: PreprocessedSession, speaker: str) -> Optional[FeatureVector]:
        if self._acoustic_ingest is not None:
            return self._acoustic_ingest.get(sample.session_id, speaker)
        if pre.audio is None:
            raise ValidationError("acoustic: waveform not available")
        annotation = self.repository.load_annotation(sample.session_id)
        if annotation is None:
            raise ValidationError("acoustic: annotation missing")
        segments = partner_speech_slices(pre.audio, annotation, speaker, pre.audio_rate)
        return gemaps_lite(segments, pre.audio_rate)

    def _linguistic(self, sample: DatasetSample, speaker: str) -> Optional[FeatureVector]:
        if self._linguistic_ingest is not None:
            return self._linguistic_ingest.get(sample.session_id, speaker)
        _, arg = _parse_mode(self.config.linguistic)
        transcripts = self.repository.load_transcripts(sample.session_id)
        document = linguistic_document(transcripts, speaker, self.config.linguistic_scope)
        return hashed_text_features(document, int(arg))

    def extract_one(
        self, item: Tuple[DatasetSample, RecordingSession]
    ) -> Tuple[Optional[DatasetSample], List[CheckOutcome], Optional[Unusable]]:
        sample, session = item
        sid = sample.session_id
        speaker = sample.gender.speaker
        with_audio = _parse_mode(self.config.acoustic)[0] == "lite"
        pre = self.preprocess_one(session, with_audio=with_audio)
        features: Dict[Modality, FeatureVector] = {}
        try:
            features[Modality.PHYSIO] = physio_features(pre.hr)
            features[Modality.MOVEMENT] = movement_features(pre.accel_magnitude, pre.gyro_magnitude)
            for modality, vector in (
                (Modality.ACOUSTIC, self._acoustic(sample, pre, speaker)),
                (Modality.LINGUISTIC, self._linguistic(sample, speaker)),
            ):
                if vector is not None:
                    features[modality] = vector
        except ValidationError as exc:
            LOGGER.warning("session %s unusable: %s", sid, exc)
            return None, pre.outcomes, Unusable(sid, "extract", str(exc))
        except (DyadError, OSError, ValueError) as exc:
            raise StageError("extract", sid, exc) from exc
        return replace(sample, features=features), pre.outcomes, None

    # -- stages -------------------------------------------------------------
    def preprocess(self, corpus: Corpus, selection: SelectionResult) -> List[CheckOutcome]:
        sessions = [corpus.session(s.session_id) for s in sorted(selection.samples, key=lambda s: s.session_id)]
        with self.metrics_collector.timed("preprocess"):
            results = self._map(self.preprocess_one, sessions)
        outcomes = [o for r in results for o in r.outcomes]
        outcomes.extend(CheckOutcome(r.session_id, "selection", r.reason) for r in selection.rejections)
        return outcomes

    def extract(self, corpus: Corpus, selection: SelectionResult) -> ExtractionResult:
        ordered = sorted(selection.samples, key=lambda s: s.session_id)
        self._load_ingest([s.session_id for s in corpus.sessions])
        items = [(s, corpus.session(s.session_id)) for s in ordered]
        with self.metrics_collector.timed("extract"):
            results = self._map(self.extract_one, items)
        out = ExtractionResult()
        for sample, outcomes, unusable in results:
            out.outcomes.extend(outcomes)
            if unusable is not None:
                out.unusable.append(unusable)
            else:
                out.samples.append(sample)
        out.outcomes.extend(CheckOutcome(r.session_id, "selection", r.reason) for r in selection.rejections)
        self.metrics_collector.unusable = len(out.unusable)
        return out

    def evaluate(
        self,
        samples: Sequence[DatasetSample],
        genders: Sequence[str] = GENDER_CHOICES,
        targets: Sequence[str] = TARGETS,
        modality_sets: Optional[Sequence[str]] = None,
    ) -> List[GridCell]:
        male, female = split_by_gender(samples)
        by_gender = {"male": male, "female": female}
        cells: List[GridCell] = []
        with self.metrics_collector.timed("evaluate"):
            for gender in genders:
                group = by_gender[gender]
                self.metrics_collector.samples_evaluated += len(group)
                cells.extend(modality_grid(group, gender, self.config, targets, modality_sets, jobs=self.jobs))
        return cells

    def run(
        self,
        out_dir: Path,
        genders: Sequence[str] = GENDER_CHOICES,
        targets: Sequence[str] = TARGETS,
        modality_sets: Optional[Sequence[str]] = None,
    ) -> PipelineResult:
        corpus = self.repository.load_corpus()
        selection = self.select(corpus)
        extraction = self.extract(corpus, selection)
        write_check_report(out_dir / "preprocess_report.csv", extraction.outcomes)
        write_feature_tables(out_dir, extraction.samples)
        cells = self.evaluate(extraction.samples, genders, targets, modality_sets)
        written = write_grid_report(out_dir, cells, extraction.samples)
        funnel = out_dir / "funnel_report.json"
        write_json_atomic(funnel, self.funnel_report(selection, extraction))
        written.append(funnel)
        return PipelineResult(selection, extraction, cells, written)

    def funnel_report(self, selection: SelectionResult, extraction: ExtractionResult) -> Dict[str, Any]:
        male, female = split_by_gender(extraction.samples)
        labels: Dict[str, Dict[str, List[int]]] = {}
        for gender, group in (("male", male), ("female", female)):
            labels[gender] = {}
            for target in TARGETS:
                y = np.array([s.label.binary(target) for s in group], dtype=np.int64)
                labels[gender][target] = [int((y == 0).sum()), int((y == 1).sum())]
        return {
            "selected": len(selection.samples),
            "rejections": selection.reason_counts(),
            "unusable": [{"session_id": u.session_id, "stage": u.stage, "reason": u.reason} for u in extraction.unusable],
            "samples": {"male": len(male), "female": len(female), "total": len(extraction.samples)},
            "label_counts": labels,
            "metrics": self.metrics_collector.as_dict(),
        }


def write_check_report(path: Path, outcomes: Sequence[CheckOutcome]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = [(o.session_id, o.check, o.outcome) for o in outcomes]
    pd.DataFrame(rows, columns=["session_id", "check", "outcome"]).to_csv(path, index=False)


def write_feature_tables(out_dir: Path, samples: Sequence[DatasetSample]) -> List[Path]:
    """One ``features_<modality>.csv`` per modality, keyed by (session_id, speaker)."""
    paths = []
    for modality in MODALITY_ORDER:
        vectors = {
            (s.session_id, s.gender.speaker): s.features[modality] for s in samples if modality in s.features
        }
        path = feature_table_path(out_dir, modality)
        write_feature_file(path, vectors)
        paths.append(path)
    return paths


def attach_feature_tables(feature_root: Path, samples: Sequence[DatasetSample]) -> List[DatasetSample]:
    """Re-attach features written by ``write_feature_tables``; samples without physio rows are dropped."""
    known = [s.session_id for s in samples]
    tables: Dict[Modality, IngestReport] = {}
    for modality in MODALITY_ORDER:
        path = feature_table_path(feature_root, modality)
        if not path.exists():
            continue
        frame = pd.read_csv(path, usecols=["dim"])
        if frame.empty:
            continue
        tables[modality] = ingest_feature_file(path, modality, int(frame["dim"].iloc[0]), known)
    out = []
    for sample in samples:
        key = (sample.session_id, sample.gender.speaker)
        features = {m: t.vectors[key] for m, t in tables.items() if key in t.vectors}
        if Modality.PHYSIO in features:
            out.append(replace(sample, features=features))
    LOGGER.info("attached stored features to %d of %d samples", len(out), len(samples))
    return out
