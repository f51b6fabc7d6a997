"""Externally computed feature files (``session_id, speaker, dim, v1..vN``).

Used for the 88-value eGeMAPS set and 768-value sentence embeddings, and as the
on-disk layout of every ``features_<modality>.csv`` the pipeline writes.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
import pandas as pd

from domain.models import FeatureVector, Modality
from errors import ParseError
from logging_config import get_logger

LOGGER = get_logger("features.ingest")

EGEMAPS_DIM = 88
EMBEDDING_DIM = 768
KEY_COLUMNS = ("session_id", "speaker", "dim")

FeatureKey = Tuple[str, str]


@dataclass(frozen=True)
class IngestRejection:
    row: int
    session_id: str
    speaker: str
    reason: str


@dataclass
class IngestReport:
    vectors: Dict[FeatureKey, FeatureVector] = field(default_factory=dict)
    rejections: List[IngestRejection] = field(default_factory=list)

    def get(self, session_id: str, speaker: str) -> Optional[FeatureVector]:
        return self.vectors.get((session_id, speaker))


def _value_columns(frame: pd.DataFrame) -> List[str]:
    cols = [c for c in frame.columns if c.startswith("v") and c[1:].isdigit()]
    return sorted(cols, key=lambda c: int(c[1:]))


def ingest_feature_file(
    path: Path,
    modality: Modality,
    dim: int,
    known_sessions: Optional[Iterable[str]] = None,
) -> IngestReport:
    """Validate every row: declared and actual dimension, finiteness, unique key, known session."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ParseError(f"cannot read feature file {path}: {exc}") from exc
    missing = [c for c in KEY_COLUMNS if c not in frame.columns]
    if missing:
        raise ParseError(f"{path}: missing columns {', '.join(missing)}")

    known = set(known_sessions) if known_sessions is not None else None
    value_cols = _value_columns(frame)
    report = IngestReport()

    for row_no, record in enumerate(frame.to_dict("records"), start=2):
        sid = record["session_id"].strip()
        speaker = record["speaker"].strip()

        def reject(reason: str) -> None:
            report.rejections.append(IngestRejection(row_no, sid, speaker, reason))
            LOGGER.warning("%s row %d (%s/%s) rejected: %s", path.name, row_no, sid, speaker, reason)

        cells = [record[c].strip() for c in value_cols]
        while cells and cells[-1] == "":
            cells.pop()
        declared = record["dim"].strip()
        if declared != str(dim) or len(cells) != dim:
            reject(f"dimension {len(cells)} (declared {declared}) != {dim}")
            continue
        try:
            values = np.array([float(c) for c in cells], dtype=np.float64)
        except ValueError:
            reject("non-numeric value")
            continue
        if not np.isfinite(values).all():
            reject("non-finite value")
            continue
        if (sid, speaker) in report.vectors:
            reject("duplicate (session_id, speaker) key")
            continue
        if known is not None and sid not in known:
            reject("unknown session")
            continue
        report.vectors[(sid, speaker)] = FeatureVector(modality, values)

    LOGGER.info("%s: %d vectors accepted, %d rejected", path.name, len(report.vectors), len(report.rejections))
    return report


def ingest_acoustic(path: Path, known_sessions: Optional[Iterable[str]] = None) -> IngestReport:
    return ingest_feature_file(path, Modality.ACOUSTIC, EGEMAPS_DIM, known_sessions)


def ingest_embeddings(path: Path, known_sessions: Optional[Iterable[str]] = None) -> IngestReport:
    return ingest_feature_file(path, Modality.LINGUISTIC, EMBEDDING_DIM, known_sessions)


def write_feature_file(path: Path, vectors: Mapping[FeatureKey, FeatureVector]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if not vectors:
        pd.DataFrame(columns=list(KEY_COLUMNS)).to_csv(path, index=False)
        return
    width = max(v.dim for v in vectors.values())
    rows = []
    for (sid, speaker), vector in sorted(vectors.items()):
        row = {"session_id": sid, "speaker": speaker, "dim": vector.dim}
        row.update({f"v{i + 1}": repr(float(x)) for i, x in enumerate(vector.values)})
        rows.append(row)
    columns = list(KEY_COLUMNS) + [f"v{i + 1}" for i in range(width)]
    pd.DataFrame(rows, columns=columns).to_csv(path, index=False)
