from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from errors import DyadError, ParseError, StageError
from infrastructure.corpus_repository import Corpus, CorpusRepository
from logging_config import get_logger
from qa.annotation import AnnotationTrack
from qa.checks import chunk_overlap_pct, consistency_checks
from qa.icc import DEFAULT_VARIANT, icc
from qa.transcript import xy_pct

LOGGER = get_logger("qa_service")

QA_COLUMNS = ("session_id", "check", "value")
NOT_AVAILABLE = "N/A"


@dataclass(frozen=True)
class QaRow:
    session_id: str
    check: str
    value: str


@dataclass
class QaReport:
    rows: List[QaRow] = field(default_factory=list)
    icc_variant: str = DEFAULT_VARIANT
    icc_value: Optional[float] = None

    @property
    def violations(self) -> List[QaRow]:
        return [r for r in self.rows if r.check.startswith("rule_") or r.check == "annotation_line"]

    @property
    def flagged_sessions(self) -> List[str]:
        return sorted({r.session_id for r in self.violations})


def _pct(value: Optional[float]) -> str:
    return NOT_AVAILABLE if value is None else f"{value:.1f}"


def load_ratings(path: Path) -> np.ndarray:
    """Items x raters matrix from a CSV; a leading non-numeric column is taken as item ids."""
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ParseError(f"cannot read ratings file {path}: {exc}") from exc
    if frame.shape[1] and not pd.api.types.is_numeric_dtype(frame.iloc[:, 0]):
        frame = frame.iloc[:, 1:]
    try:
        return frame.to_numpy(dtype=np.float64)
    except ValueError as exc:
        raise ParseError(f"{path}: ratings must be numeric ({exc})") from exc


@dataclass
class QaService:
    """Corpus-wide annotation, transcript and context-code validation."""

    repository: CorpusRepository
    jobs: int = 1
    icc_variant: str = DEFAULT_VARIANT

    def check_session(self, item: Tuple[str, Corpus]) -> List[QaRow]:
        sid, corpus = item
        rows: List[QaRow] = []
        try:
            annotation = self.repository.load_annotation(sid) or AnnotationTrack()
            transcripts = self.repository.load_transcripts(sid)
        except (DyadError, OSError) as exc:
            raise StageError("qa", sid, exc) from exc
        for rejected in annotation.rejected:
            rows.append(QaRow(sid, "annotation_line", f"line {rejected.line_no}: {rejected.reason}"))
        code = next((c for c in corpus.codes if c.session_id == sid), None)
        if code is not None:
            for violation in consistency_checks(code, annotation, transcripts):
                rows.append(QaRow(sid, f"rule_{violation.rule}", violation.detail))
        for speaker in ("m", "f"):
            transcript = transcripts.get(speaker)
            if transcript is None:
                continue
            rows.append(QaRow(sid, f"chunk_overlap_{speaker}", _pct(chunk_overlap_pct(transcript, annotation, speaker))))
            rows.append(QaRow(sid, f"xy_pct_{speaker}", _pct(xy_pct(transcript))))
        return rows

    def run(self, corpus: Corpus, ratings: Optional[np.ndarray] = None) -> QaReport:
        session_ids = sorted(s.session_id for s in corpus.sessions if s.audio is not None)
        items = [(sid, corpus) for sid in session_ids]
        if self.jobs > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                per_session = list(pool.map(self.check_session, items))
        else:
            per_session = [self.check_session(item) for item in items]
        report = QaReport([row for rows in per_session for row in rows], icc_variant=self.icc_variant)
        if ratings is not None:
            report.icc_value = icc(ratings, self.icc_variant)
            report.rows.append(QaRow("", "icc", f"{report.icc_value:.6f}"))
        LOGGER.info(
            "qa: %d sessions checked, %d violations in %d sessions",
            len(session_ids),
            len(report.violations),
            len(report.flagged_sessions),
        )
        return report


def write_qa_report(path: Path, report: QaReport) -> None:
    """CSV with a ``# icc_variant=...`` header line ahead of the column row."""
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([(r.session_id, r.check, r.value) for r in report.rows], columns=list(QA_COLUMNS))
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(f"# icc_variant={report.icc_variant}\n")
        frame.to_csv(handle, index=False)


def read_qa_report(path: Path) -> Tuple[str, pd.DataFrame]:
    with path.open("r", encoding="utf-8") as handle:
        header = handle.readline().strip()
        frame = pd.read_csv(handle, dtype=str, keep_default_na=False)
    variant = header.split("=", 1)[1] if header.startswith("# icc_variant=") else ""
    return variant, frame
