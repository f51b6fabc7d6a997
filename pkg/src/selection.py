"""Sample selection funnel: from raw recording sessions to labelled dataset samples.

A session survives when it has non-corrupt audio plus every sensor series, lies
inside the couple's declared collection hours, has a completed self-report, and
its context code says both partners spoke. Everything that is dropped lands in
the rejection report with an enumerated reason.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Tuple

from domain.models import (
    ContextCode,
    CoupleSchedule,
    DatasetSample,
    Gender,
    RecordingSession,
    SelfReport,
)
from labels import binarize_affect
from logging_config import get_logger
from preprocessing import detect_corrupt_audio

LOGGER = get_logger("selection")

REJECTION_REASONS = (
    "missing_sensor",
    "no_audio",
    "corrupt_audio",
    "outside_window",
    "no_report",
    "report_incomplete",
    "missing_code",
    "no_partner_speech",
    "missing_reference",
)


@dataclass(frozen=True)
class Rejection:
    session_id: str
    reason: str
    detail: str = ""


@dataclass
class SelectionResult:
    samples: List[DatasetSample] = field(default_factory=list)
    rejections: List[Rejection] = field(default_factory=list)

    def reason_counts(self) -> Dict[str, int]:
        counts = Counter(r.reason for r in self.rejections)
        return {reason: counts.get(reason, 0) for reason in REJECTION_REASONS}


def _check_session(session: RecordingSession, schedules: Mapping[int, CoupleSchedule]):
    if not session.has_all_sensors:
        missing = [n for n in ("hr", "accel", "gyro", "light", "wear") if not session.has_series(n)]
        return "missing_sensor", ",".join(missing)
    if session.audio is None:
        return "no_audio", ""
    if detect_corrupt_audio(session.audio.byte_size, session.duration_s, session.audio.sample_rate) == "corrupt":
        return "corrupt_audio", f"bytes={session.audio.byte_size}"
    schedule = schedules.get(session.partner.couple_id)
    if schedule is None:
        return "missing_reference", f"no schedule for couple {session.partner.couple_id}"
    if not schedule.contains(session.slot):
        return "outside_window", f"{session.slot.day.isoformat()} {session.slot.hour:02d}h"
    return None, ""


def select_samples(
    sessions: Iterable[RecordingSession],
    reports: Iterable[SelfReport],
    codes: Iterable[ContextCode],
    schedules: Iterable[CoupleSchedule],
) -> SelectionResult:
    sessions = list(sessions)
    report_by_id = {r.session_id: r for r in reports}
    code_by_id = {c.session_id: c for c in codes}
    schedule_by_couple = {s.couple_id: s for s in schedules}
    known_ids = {s.session_id for s in sessions}

    result = SelectionResult()

    for session in sessions:
        reason, detail = _check_session(session, schedule_by_couple)
        if reason is None:
            report = report_by_id.get(session.session_id)
            code = code_by_id.get(session.session_id)
            if report is None:
                reason = "no_report"
            elif not report.completed:
                reason = "report_incomplete"
            elif code is None:
                reason = "missing_code"
            elif not (code.male_spoke and code.female_spoke):
                reason = "no_partner_speech"
                detail = f"male_spoke={code.male_spoke} female_spoke={code.female_spoke}"
        if reason is not None:
            result.rejections.append(Rejection(session.session_id, reason, detail))
            LOGGER.debug("rejected %s: %s %s", session.session_id, reason, detail)
            continue

        report = report_by_id[session.session_id]
        result.samples.append(
            DatasetSample(
                session_id=session.session_id,
                couple_id=session.partner.couple_id,
                gender=session.partner.gender,
                label=binarize_affect(report.valence_raw, report.arousal_raw),
            )
        )

    dangling = sorted((set(report_by_id) | set(code_by_id)) - known_ids)
    for session_id in dangling:
        kinds = [k for k, table in (("report", report_by_id), ("code", code_by_id)) if session_id in table]
        result.rejections.append(Rejection(session_id, "missing_reference", f"{'+'.join(kinds)} without session"))
        LOGGER.warning("%s references unknown session %s", "+".join(kinds), session_id)

    LOGGER.info(
        "selected %d of %d sessions (%d rejections)",
        len(result.samples),
        len(sessions),
        len(result.rejections),
    )
    return result


def split_by_gender(samples: Iterable[DatasetSample]) -> Tuple[List[DatasetSample], List[DatasetSample]]:
    male: List[DatasetSample] = []
    female: List[DatasetSample] = []
    for sample in samples:
        (male if sample.gender is Gender.MALE else female).append(sample)
    return male, female
