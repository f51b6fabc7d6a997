"""Append-only protocol event log and its replay into corpus state."""

import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from errors import ParseError, ValidationError

WATCH_ORDER = {"central": 0, "peripheral": 1, "pair": 2}


@dataclass(frozen=True)
class EventRecord:
    time_s: float
    couple: int
    watch: str
    event: str
    payload: Dict[str, Any] = field(default_factory=dict)
    seq: int = 0

    def sort_key(self):
        return (self.time_s, self.couple, WATCH_ORDER.get(self.watch, 9), self.seq)

    def to_json(self, epoch: Optional[datetime] = None) -> str:
        row = {
            "time_s": round(self.time_s, 3),
            "couple": self.couple,
            "watch": self.watch,
            "event": self.event,
            "payload": self.payload,
            "seq": self.seq,
        }
        if epoch is not None:
            row["timestamp"] = (epoch + timedelta(seconds=self.time_s)).isoformat(timespec="milliseconds")
        return json.dumps(row, sort_keys=True)


class EventLog:
    def __init__(self, records: Iterable[EventRecord] = ()):
        self._records: List[EventRecord] = []
        for record in records:
            self.append(record)

    def append(self, record: EventRecord) -> None:
        if self._records and record.time_s < self._records[-1].time_s:
            raise ValidationError(
                f"event {record.event} at {record.time_s} precedes last event at {self._records[-1].time_s}"
            )
        self._records.append(record)

    @property
    def records(self) -> List[EventRecord]:
        return list(self._records)

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def of_kind(self, event: str) -> List[EventRecord]:
        return [r for r in self._records if r.event == event]


def merge_logs(logs: Iterable[EventLog]) -> EventLog:
    """Combine per-couple logs into one timeline ordered by (time, couple, watch, seq)."""
    merged = [record for log in logs for record in log]
    return EventLog(sorted(merged, key=EventRecord.sort_key))


def write_event_log(log: EventLog, path: Path, epoch: Optional[datetime] = None) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for record in log:
            fh.write(record.to_json(epoch) + "\n")


def read_event_log(path: Path) -> EventLog:
    records = []
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            records.append(
                EventRecord(
                    float(row["time_s"]),
                    int(row["couple"]),
                    row["watch"],
                    row["event"],
                    row.get("payload", {}),
                    int(row.get("seq", 0)),
                )
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"{path.name}:{line_no}: bad event record ({exc})") from exc
    return EventLog(records)


@dataclass
class ReplayedSession:
    session_id: str
    couple: int
    watch: str
    trigger_kind: str
    start_s: float
    audio: str = "recording"
    report: Optional[str] = None
    valence_raw: Optional[float] = None
    arousal_raw: Optional[float] = None

    def as_tuple(self):
        return (
            self.session_id,
            self.couple,
            self.watch,
            self.trigger_kind,
            round(self.start_s, 3),
            self.audio,
            self.report,
            self.valence_raw,
            self.arousal_raw,
        )


def replay(log: Iterable[EventRecord]) -> Dict[str, ReplayedSession]:
    """Rebuild the per-session end state (audio kept or deleted, report outcome) from events."""
    sessions: Dict[str, ReplayedSession] = {}
    for record in log:
        p = record.payload
        if record.event in ("RecordStart", "BackupStart"):
            sessions[p["session_id"]] = ReplayedSession(
                p["session_id"], record.couple, record.watch, p["trigger_kind"], record.time_s
            )
            continue
        sid = p.get("session_id")
        if sid is None or sid not in sessions:
            continue
        session = sessions[sid]
        if record.event == "RecordEnd":
            if session.audio == "recording":
                session.audio = "pending"
        elif record.event == "AudioDeleted":
            session.audio = "deleted"
        elif record.event == "AudioRetained":
            session.audio = "retained"
        elif record.event == "ReportCompleted":
            session.report = "completed"
            session.valence_raw = p.get("valence_raw")
            session.arousal_raw = p.get("arousal_raw")
        elif record.event == "ReportDismissed":
            session.report = "dismissed"
    return sessions
