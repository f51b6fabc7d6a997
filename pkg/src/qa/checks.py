"""Cross-checks between context codes, speaker annotations and transcripts."""

from dataclasses import dataclass
from typing import List, Mapping, Optional

from domain.models import ContextCode
from logging_config import get_logger
from qa.annotation import AnnotationTrack
from qa.transcript import Transcript

LOGGER = get_logger("qa.checks")

ROMANTIC_PARTNER = "romantic partner"


@dataclass(frozen=True)
class Violation:
    session_id: str
    rule: str
    detail: str


def consistency_checks(
    code: ContextCode,
    annotation: AnnotationTrack,
    transcripts: Mapping[str, Optional[Transcript]],
) -> List[Violation]:
    """Rules: (a) both spoke => partner is the romantic partner; (b)/(c) a speaker who
    spoke has a non-empty transcript and at least one annotated turn."""
    sid = code.session_id
    violations: List[Violation] = []
    if code.male_spoke and code.female_spoke and code.interaction_partner != ROMANTIC_PARTNER:
        violations.append(
            Violation(sid, "a", f"both partners spoke but interaction_partner={code.interaction_partner!r}")
        )
    for rule, speaker, spoke in (("b", "m", code.male_spoke), ("c", "f", code.female_spoke)):
        if not spoke:
            continue
        transcript = transcripts.get(speaker)
        if transcript is None or transcript.is_empty:
            violations.append(Violation(sid, rule, f"{speaker} spoke but transcript_{speaker} is empty"))
        if not annotation.has_label(speaker):
            violations.append(Violation(sid, rule, f"{speaker} spoke but annotation has no '{speaker}' segment"))
    for v in violations:
        LOGGER.warning("session %s violates rule %s: %s", v.session_id, v.rule, v.detail)
    return violations


def chunk_overlap_pct(transcript: Transcript, annotation: AnnotationTrack, speaker: str) -> Optional[float]:
    """Percent of non-empty chunks whose [15i, 15(i+1)) window meets a ``speaker`` turn."""
    chunks = transcript.non_empty_chunks()
    if not chunks:
        return None
    turns = [(s.start, s.end) for s in annotation.segments if s.label == speaker]
    hits = 0
    for index in chunks:
        lo, hi = transcript.chunk_window(index)
        if any(start < hi and end > lo for start, end in turns):
            hits += 1
    return 100.0 * hits / len(chunks)
