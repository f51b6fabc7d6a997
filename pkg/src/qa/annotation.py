"""Speaker-turn annotation tracks (``annotation.txt``: start TAB end TAB label)."""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from logging_config import get_logger

LOGGER = get_logger("qa.annotation")

SPEAKER_LABELS = ("m", "f", "u", "c", "v", "p", "n", "u-tv/radio")
MAX_DURATION_S = 300.0


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    label: str


@dataclass(frozen=True)
class RejectedLine:
    line_no: int
    text: str
    reason: str


@dataclass(frozen=True)
class AnnotationTrack:
    segments: Tuple[Segment, ...] = ()
    rejected: Tuple[RejectedLine, ...] = ()
    warnings: Tuple[str, ...] = ()

    def labels(self) -> List[str]:
        return [s.label for s in self.segments]

    def has_label(self, label: str) -> bool:
        return any(s.label == label for s in self.segments)


def _parse_line(line: str, max_duration_s: float) -> Tuple[Optional[Segment], str]:
    parts = line.split("\t")
    if len(parts) != 3:
        return None, f"expected 3 tab-separated fields, got {len(parts)}"
    try:
        start, end = float(parts[0]), float(parts[1])
    except ValueError:
        return None, "start/end not numeric"
    label = parts[2].strip()
    if label not in SPEAKER_LABELS:
        return None, f"unknown label {label!r}"
    if not 0.0 <= start < end:
        return None, f"invalid interval {start}-{end}"
    if end > max_duration_s:
        return None, f"end {end} beyond {max_duration_s:g}s"
    return Segment(start, end, label), ""


def parse_annotation(text: str, max_duration_s: float = MAX_DURATION_S) -> AnnotationTrack:
    segments: List[Segment] = []
    rejected: List[RejectedLine] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        segment, reason = _parse_line(line, max_duration_s)
        if segment is None:
            rejected.append(RejectedLine(line_no, line, reason))
            LOGGER.warning("annotation line %d rejected: %s", line_no, reason)
        else:
            segments.append(segment)
    warnings: Tuple[str, ...] = ()
    if not segments and not rejected:
        warnings = ("empty_annotation",)
    return AnnotationTrack(tuple(segments), tuple(rejected), warnings)


def format_annotation(track: AnnotationTrack) -> str:
    return "".join(f"{s.start:.3f}\t{s.end:.3f}\t{s.label}\n" for s in track.segments)
