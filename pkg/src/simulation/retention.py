"""Hourly audio retention: keep at most the last eligible audio per watch."""

from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Tuple

from domain.models import SelfReport, TriggerKind


@dataclass(frozen=True)
class HourRecording:
    session_id: str
    start_s: float
    trigger_kind: TriggerKind
    has_audio: bool = True


@dataclass(frozen=True)
class RetentionResult:
    retained: Optional[str]
    # (session_id, reason) with reason "report_not_completed" or "superseded".
    deletions: Tuple[Tuple[str, str], ...] = ()
    # Sensor series are never deleted.
    sensors_kept: Tuple[str, ...] = field(default_factory=tuple)


def apply_retention(
    hour_sessions: Sequence[HourRecording],
    reports: Mapping[str, SelfReport],
) -> RetentionResult:
    """Interaction audio needs a completed report; backup audio is kept regardless.
    Of the eligible recordings only the latest survives."""
    ordered = sorted(hour_sessions, key=lambda s: (s.start_s, s.session_id))
    deletions: List[Tuple[str, str]] = []
    eligible: List[HourRecording] = []
    for rec in ordered:
        if not rec.has_audio:
            continue
        report = reports.get(rec.session_id)
        if rec.trigger_kind is TriggerKind.INTERACTION and not (report is not None and report.completed):
            deletions.append((rec.session_id, "report_not_completed"))
        else:
            eligible.append(rec)
    retained = eligible[-1].session_id if eligible else None
    deletions.extend((rec.session_id, "superseded") for rec in eligible[:-1])
    return RetentionResult(retained, tuple(deletions), tuple(rec.session_id for rec in ordered))
