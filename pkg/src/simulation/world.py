"""Seeded simulation of couples' days and of the two-watch recording protocol.

``run_hour`` drives both watches of one couple through a single clock hour
against minute-resolution traces. Timed protocol events (recording ends,
report prompts, timeouts, cooldown expiry, armed backups) sit in a queue owned
by ``ProtocolRuntime`` and carry over into the next hour, so the spacing rule
holds across hour boundaries.
"""

import heapq
import itertools
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, time, timedelta
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from domain.config_models import SimConfig
from domain.models import (
    EVENING_BOUNDS,
    MORNING_BOUNDS,
    SENSOR_SERIES,
    ContextCode,
    CoupleSchedule,
    Gender,
    HourSlot,
    PartnerRef,
    Role,
    SelfReport,
    TriggerKind,
)
from errors import StageError
from infrastructure.corpus_repository import CorpusRepository
from logging_config import get_logger
from simulation.conversation import code_from_annotation, session_annotation
from simulation.event_log import WATCH_ORDER, EventLog, EventRecord, merge_logs, write_event_log
from simulation.proximity import rssi_from_distance
from simulation.retention import HourRecording, apply_retention
from simulation.sensors import SensorInputs, synth_sensors
from simulation.traces import HourTraces, StudyTraces, simulate_traces
from simulation.trigger_fsm import (
    BACKUP_MINUTE,
    FIRST_PROMPT_S,
    INTERACTION_CUTOFF_S,
    PERIPHERAL_DELAY_MAX_S,
    SECOND_PROMPT_S,
    SPACING_S,
    Action,
    EventKind,
    FsmState,
    ProtocolEvent,
    TriggerState,
    step_trigger_fsm,
)
from simulation.vad import detect_speech, synth_vad_snippet

LOGGER = get_logger("simulation.world")

WATCHES = ("central", "peripheral")
REPORT_DURATION_S = (15.0, 45.0)


@dataclass(frozen=True)
class CoupleProfile:
    couple_id: int
    patient: PartnerRef
    support: PartnerRef
    schedule: CoupleSchedule
    # gender -> (valence centre, arousal centre) of the latent walks
    centers: Dict[Gender, Tuple[float, float]]

    def partner_for(self, watch: str) -> PartnerRef:
        return self.patient if watch == "central" else self.support


@dataclass
class SessionDraft:
    """A recording as the protocol saw it; signals are attached later, if at all."""

    session_id: str
    partner: PartnerRef
    slot: HourSlot
    start_s: float
    hour_start_s: float
    duration_s: float
    trigger_kind: TriggerKind
    peripheral_delay_s: float = 0.0
    audio_kept: bool = True
    audio_retained: bool = False

    @property
    def watch(self) -> str:
        return self.partner.watch

    @property
    def start_offset_s(self) -> float:
        return self.start_s - self.hour_start_s


@dataclass
class HourResult:
    sessions: List[SessionDraft] = field(default_factory=list)
    reports: List[SelfReport] = field(default_factory=list)
    events: List[EventRecord] = field(default_factory=list)


def hour_clock(day_index: int, hour: int) -> float:
    return float((day_index * 24 + hour) * 3600)


class ProtocolRuntime:
    """Mutable protocol state for one couple: both FSMs, the timed-event queue and the outputs."""

    def __init__(
        self,
        profile: CoupleProfile,
        config: SimConfig,
        rng: np.random.Generator,
        traces: Optional[StudyTraces] = None,
    ):
        self.profile = profile
        self.config = config
        self.rng = rng
        self.traces = traces
        self.states: Dict[str, TriggerState] = {w: TriggerState(w) for w in WATCHES}
        self.log = EventLog()
        self.sessions: Dict[str, SessionDraft] = {}
        self.reports: Dict[str, SelfReport] = {}
        self._pending: List[tuple] = []
        self._counter = itertools.count()
        self._log_seq = itertools.count()
        self._hour_sessions: Dict[Tuple[str, float], List[str]] = defaultdict(list)
        self._hour_seq: Dict[Tuple[str, float], int] = defaultdict(int)
        self._slots: Dict[float, HourSlot] = {}
        self._hour = HourResult()

    # -- queue -------------------------------------------------------------
    def schedule(self, at: float, watch: str, event: ProtocolEvent) -> None:
        heapq.heappush(self._pending, (at, WATCH_ORDER[watch], next(self._counter), watch, event))

    def process_until(self, limit: float, inclusive: bool = True) -> None:
        while self._pending:
            at = self._pending[0][0]
            if at > limit or (at == limit and not inclusive):
                break
            at, _, _, watch, event = heapq.heappop(self._pending)
            self.dispatch(watch, event, at)

    def drain(self) -> None:
        self.process_until(float("inf"))

    # -- logging -----------------------------------------------------------
    def emit(self, watch: str, time_s: float, event: str, **payload) -> None:
        record = EventRecord(time_s, self.profile.couple_id, watch, event, payload, next(self._log_seq))
        self.log.append(record)
        self._hour.events.append(record)

    # -- sessions ----------------------------------------------------------
    def register_slot(self, hour_start: float, slot: HourSlot) -> None:
        self._slots[hour_start] = slot

    def new_session_id(self, watch: str, clock: float) -> str:
        hour_start = float(np.floor(clock / 3600.0) * 3600.0)
        key = (watch, hour_start)
        self._hour_seq[key] += 1
        slot = self._slots[hour_start]
        partner = self.profile.partner_for(watch)
        return f"c{partner.couple_id:02d}_{partner.role.value}_{slot.day:%Y%m%d}_{slot.hour:02d}_{self._hour_seq[key]:02d}"

    def _open_session(self, watch: str, sid: str, clock: float, kind: TriggerKind, delay: float) -> SessionDraft:
        hour_start = float(np.floor(clock / 3600.0) * 3600.0)
        draft = SessionDraft(
            session_id=sid,
            partner=self.profile.partner_for(watch),
            slot=self._slots[hour_start],
            start_s=clock,
            hour_start_s=hour_start,
            duration_s=self.config.session_duration_s,
            trigger_kind=kind,
            peripheral_delay_s=delay,
        )
        self.sessions[sid] = draft
        self._hour_sessions[(watch, hour_start)].append(sid)
        self._hour.sessions.append(draft)
        self.schedule(clock + draft.duration_s, watch, ProtocolEvent(EventKind.RECORD_END))
        return draft

    # -- FSM dispatch ------------------------------------------------------
    def dispatch(self, watch: str, event: ProtocolEvent, clock: float) -> None:
        before = self.states[watch]
        self._log_input(watch, before, event, clock)
        after, actions = step_trigger_fsm(before, event, clock)
        self.states[watch] = after
        failed = any(a.name == "ProtocolError" for a in actions)
        if event.kind is EventKind.REPORT_COMPLETED and not failed:
            p = event.payload
            report = SelfReport(p["session_id"], p["valence_raw"], p["arousal_raw"], p["within_first_window"], True)
            self.reports[report.session_id] = report
            self._hour.reports.append(report)
        for action in actions:
            self._perform(watch, action, clock)

    def _log_input(self, watch: str, state: TriggerState, event: ProtocolEvent, clock: float) -> None:
        p = event.payload
        if event.kind is EventKind.SCAN:
            self.emit(watch, clock, "Scan", rssi=round(p["rssi"], 2), threshold=p["threshold"])
        elif event.kind is EventKind.VAD_RESULT:
            self.emit(watch, clock, "VadPositive" if p["speech"] else "VadNegative")
        elif event.kind is EventKind.RECORD_END:
            self.emit(watch, clock, "RecordEnd", session_id=state.session_id)
        elif event.kind is EventKind.REPORT_STARTED:
            self.emit(watch, clock, "ReportStarted", session_id=p["session_id"], within_first_window=p["within_first_window"])
        elif event.kind is EventKind.REPORT_COMPLETED:
            self.emit(
                watch,
                clock,
                "ReportCompleted",
                session_id=p["session_id"],
                valence_raw=p["valence_raw"],
                arousal_raw=p["arousal_raw"],
            )

    def _perform(self, watch: str, action: Action, clock: float) -> None:
        p = action.payload
        name = action.name
        if name == "ConnectPeripheral":
            self.emit(watch, clock, "ConnectPeripheral", session_id=p["session_id"])
        elif name == "StartBoth":
            delay = round(float(self.rng.uniform(0.0, PERIPHERAL_DELAY_MAX_S)), 3)
            self._open_session(watch, p["session_id"], clock, TriggerKind.INTERACTION, delay)
            self.emit(
                watch, clock, "RecordStart", session_id=p["session_id"], trigger_kind="interaction", peripheral_delay_s=delay
            )
            peer = self.new_session_id("peripheral", clock + delay)
            self.schedule(
                clock + delay,
                "peripheral",
                ProtocolEvent(EventKind.REMOTE_START, {"session_id": peer, "delay": delay}),
            )
        elif name == "StartRecording":
            self._open_session(watch, p["session_id"], clock, TriggerKind.INTERACTION, p["delay"])
            self.emit(
                watch,
                clock,
                "RecordStart",
                session_id=p["session_id"],
                trigger_kind="interaction",
                peripheral_delay_s=p["delay"],
            )
        elif name == "PromptReport":
            self.emit(watch, clock, "ReportPrompt", session_id=p["session_id"])
            self._plan_report(watch, p["session_id"], clock)
            self.schedule(clock + SPACING_S, watch, ProtocolEvent(EventKind.COOLDOWN_EXPIRED))
        elif name == "Vibrate2":
            self.emit(watch, clock, "Vibrate2", session_id=p["session_id"])
        elif name == "DismissReport":
            sid = p["session_id"]
            self.emit(watch, clock, "ReportDismissed", session_id=sid)
            report = SelfReport(sid, None, None, False, False)
            self.reports[sid] = report
            self._hour.reports.append(report)
        elif name == "DeleteAudio":
            self.sessions[p["session_id"]].audio_kept = False
            self.emit(watch, clock, "AudioDeleted", session_id=p["session_id"], reason="report_not_completed")
        elif name == "ArmBackup":
            sid = self.new_session_id(watch, p["at"])
            self.emit(watch, clock, "BackupArmed", session_id=sid, due_s=round(p["at"], 3))
            self.schedule(p["at"], watch, ProtocolEvent(EventKind.BACKUP_DUE, {"session_id": sid}))
        elif name == "StartBackup":
            self._open_session(watch, p["session_id"], clock, TriggerKind.BACKUP, 0.0)
            self.emit(watch, clock, "BackupStart", session_id=p["session_id"], trigger_kind="backup")
        elif name == "ApplyRetention":
            self._apply_retention(watch, p["hour_start"], clock)
        elif name == "ProtocolError":
            self.emit(watch, clock, "ProtocolError", detail=p["detail"])
            LOGGER.warning("couple %d %s watch: %s", self.profile.couple_id, watch, p["detail"])

    def _plan_report(self, watch: str, sid: str, clock: float) -> None:
        behaviour = self.config.behaviour
        if self.rng.random() >= self.config.compliance:
            self.schedule(clock + FIRST_PROMPT_S, watch, ProtocolEvent(EventKind.TIMEOUT, {"session_id": sid}))
            self.schedule(
                clock + FIRST_PROMPT_S + SECOND_PROMPT_S,
                watch,
                ProtocolEvent(EventKind.TIMEOUT, {"session_id": sid}),
            )
            return
        first = bool(self.rng.random() < behaviour.first_window_start_prob)
        if first:
            started = clock + float(self.rng.uniform(5.0, FIRST_PROMPT_S - 5.0))
        else:
            self.schedule(clock + FIRST_PROMPT_S, watch, ProtocolEvent(EventKind.TIMEOUT, {"session_id": sid}))
            started = clock + FIRST_PROMPT_S + float(self.rng.uniform(5.0, SECOND_PROMPT_S - 5.0))
        valence, arousal = self._report_values(self.sessions[sid])
        self.schedule(
            started,
            watch,
            ProtocolEvent(EventKind.REPORT_STARTED, {"session_id": sid, "within_first_window": first}),
        )
        self.schedule(
            started + float(self.rng.uniform(*REPORT_DURATION_S)),
            watch,
            ProtocolEvent(
                EventKind.REPORT_COMPLETED,
                {"session_id": sid, "valence_raw": valence, "arousal_raw": arousal, "within_first_window": first},
            ),
        )

    def _report_values(self, draft: SessionDraft) -> Tuple[float, float]:
        gender = draft.partner.gender
        if self.traces is not None:
            minute = draft.start_s / 60.0
            valence = self.traces.session_mean(self.traces.valence, gender, minute, draft.duration_s)
            arousal = self.traces.session_mean(self.traces.arousal, gender, minute, draft.duration_s)
        else:
            valence, arousal = self.profile.centers[gender]
        sd = self.config.noise.report_sd
        out = []
        for value in (valence, arousal):
            noisy = value + float(self.rng.normal(0.0, sd)) if sd > 0 else value
            out.append(float(np.clip(round(noisy), 0.0, 100.0)))
        return out[0], out[1]

    def _apply_retention(self, watch: str, hour_start: float, clock: float) -> None:
        ids = self._hour_sessions.get((watch, hour_start), [])
        if not ids:
            return
        records = [
            HourRecording(sid, self.sessions[sid].start_s, self.sessions[sid].trigger_kind, self.sessions[sid].audio_kept)
            for sid in ids
        ]
        result = apply_retention(records, self.reports)
        for sid, reason in result.deletions:
            draft = self.sessions[sid]
            if draft.audio_kept:
                draft.audio_kept = False
                self.emit(watch, clock, "AudioDeleted", session_id=sid, reason=reason)
        if result.retained is not None:
            self.sessions[result.retained].audio_retained = True
            self.emit(watch, clock, "AudioRetained", session_id=result.retained)

    def take_hour(self) -> HourResult:
        done, self._hour = self._hour, HourResult()
        return done


def run_hour(
    runtime: ProtocolRuntime,
    day_index: int,
    hour: int,
    traces: HourTraces,
    in_window: Optional[bool] = None,
) -> HourResult:
    """Drive both watches through one clock hour.

    ``in_window`` defaults to whether the couple's schedule covers the hour;
    passing True for an undeclared hour simulates a watch collecting outside
    its window.
    """
    config = runtime.config
    hour_start = hour_clock(day_index, hour)
    hour_end = hour_start + 3600.0
    day = config.start_date + timedelta(days=day_index)
    window = runtime.profile.schedule.window_for(day, hour)
    active = window is not None if in_window is None else bool(in_window)
    runtime.register_slot(hour_start, HourSlot(day, hour, window))

    runtime.process_until(hour_start, inclusive=False)
    for watch in WATCHES:
        runtime.dispatch(watch, ProtocolEvent(EventKind.HOUR_START, {"in_window": active}), hour_start)

    for minute in range(60):
        t = hour_start + minute * 60.0
        runtime.process_until(t)
        if minute == BACKUP_MINUTE:
            for watch in WATCHES:
                runtime.dispatch(watch, ProtocolEvent(EventKind.BACKUP_CHECK), t)
        if not active or minute * 60.0 >= INTERACTION_CUTOFF_S:
            continue
        if not all(runtime.states[w].state is FsmState.SCANNING for w in WATCHES):
            continue
        rssi = rssi_from_distance(float(traces.distance_m[minute]), config.path_loss, runtime.rng)
        runtime.dispatch(
            "central",
            ProtocolEvent(EventKind.SCAN, {"rssi": rssi, "threshold": config.rssi_threshold_dbm}),
            t,
        )
        if runtime.states["central"].state is not FsmState.VAD_CHECK:
            continue
        snippet = synth_vad_snippet(traces.speech(minute), runtime.rng, config.vad)
        speech = detect_speech(snippet, config.vad)
        payload = {"speech": speech, "session_id": runtime.new_session_id("central", t) if speech else None}
        runtime.dispatch("central", ProtocolEvent(EventKind.VAD_RESULT, payload), t)

    runtime.process_until(hour_end, inclusive=False)
    for watch in WATCHES:
        runtime.dispatch(watch, ProtocolEvent(EventKind.HOUR_END), hour_end)
    return runtime.take_hour()


def _shift_window(window: Tuple[int, int], shift: int, bounds: Tuple[int, int]) -> Tuple[int, int]:
    lo, hi = window[0] + shift, window[1] + shift
    if lo < bounds[0]:
        lo, hi = bounds[0], hi + bounds[0] - lo
    if hi > bounds[1]:
        lo, hi = lo - (hi - bounds[1]), bounds[1]
    return lo, hi


def couple_rng(seed: int, couple_id: int, stream: int, *extra: int) -> np.random.Generator:
    """Independent generator per (couple, stream); streams: 0 profile, 1 traces, 2 protocol, 3 faults, 4 sensors."""
    return np.random.default_rng([seed, couple_id, stream, *extra])


def make_couples(config: SimConfig) -> List[CoupleProfile]:
    profiles = []
    behaviour = config.behaviour
    for couple_id in range(1, config.n_couples + 1):
        rng = couple_rng(config.seed, couple_id, 0)
        patient_gender = Gender.MALE if rng.random() < 0.5 else Gender.FEMALE
        support_gender = Gender.FEMALE if patient_gender is Gender.MALE else Gender.MALE
        sched = config.schedule_for(couple_id)
        jitter = sched.jitter_hours
        shifts = rng.integers(-jitter, jitter + 1, 3) if jitter > 0 else np.zeros(3, dtype=int)
        schedule = CoupleSchedule(
            couple_id,
            _shift_window(sched.weekday_morning, int(shifts[0]), MORNING_BOUNDS),
            _shift_window(sched.weekday_evening, int(shifts[1]), EVENING_BOUNDS),
            _shift_window(sched.weekend, int(shifts[2]), (0, 24)),
        )
        centers = {}
        for gender in (Gender.MALE, Gender.FEMALE):
            offsets = rng.uniform(-behaviour.center_spread, behaviour.center_spread, 2)
            centers[gender] = (
                float(np.clip(behaviour.valence_center + offsets[0], 5.0, 95.0)),
                float(np.clip(behaviour.arousal_center + offsets[1], 5.0, 95.0)),
            )
        profiles.append(
            CoupleProfile(
                couple_id,
                PartnerRef(couple_id, Role.PATIENT, patient_gender),
                PartnerRef(couple_id, Role.SUPPORT_PARTNER, support_gender),
                schedule,
                centers,
            )
        )
    return profiles


@dataclass
class CoupleRun:
    profile: CoupleProfile
    traces: StudyTraces
    runtime: ProtocolRuntime
    # sessions that were recorded outside the declared window because of an injected fault
    outside_window: List[str] = field(default_factory=list)

    @property
    def sessions(self) -> List[SessionDraft]:
        return sorted(self.runtime.sessions.values(), key=lambda s: (s.start_s, s.watch != "central", s.session_id))

    @property
    def reports(self) -> Dict[str, SelfReport]:
        return self.runtime.reports


def simulate_couple(profile: CoupleProfile, config: SimConfig) -> CoupleRun:
    seed, cid = config.seed, profile.couple_id
    traces = simulate_traces(cid, config.days, config.behaviour, profile.centers, couple_rng(seed, cid, 1))
    runtime = ProtocolRuntime(profile, config, couple_rng(seed, cid, 2), traces)
    faults = couple_rng(seed, cid, 3)
    run = CoupleRun(profile, traces, runtime)
    for day_index in range(config.days):
        day = config.start_date + timedelta(days=day_index)
        hours = profile.schedule.hours_for(day)
        for hour in hours:
            run_hour(runtime, day_index, hour, traces.hour(day_index, hour))
            if hour == hours[-1]:
                end = hour_clock(day_index, hour) + 3600.0
                for watch in WATCHES:
                    runtime.emit(watch, end, "EndOfDayAffectiveSlider", day=day.isoformat())
                    runtime.emit(watch, end, "EndOfDayPanas", day=day.isoformat())
            after = hour + 1
            if after < 24 and after not in hours and faults.random() < config.faults.outside_window_rate:
                result = run_hour(runtime, day_index, after, traces.hour(day_index, after), in_window=True)
                run.outside_window.extend(s.session_id for s in result.sessions)
                LOGGER.debug("couple %d collected outside window on %s %02dh", cid, day, after)
    runtime.drain()
    LOGGER.info(
        "couple %d: %d sessions, %d reports, %d events",
        cid,
        len(runtime.sessions),
        len(runtime.reports),
        len(runtime.log),
    )
    return run


@dataclass
class ProtocolRun:
    config: SimConfig
    couples: List[CoupleRun]
    log: EventLog


def simulate_protocol(config: SimConfig, jobs: int = 1) -> ProtocolRun:
    """Simulate every couple; couples own independent generators so ``jobs`` never changes the result."""
    profiles = make_couples(config)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            couples = list(pool.map(lambda p: simulate_couple(p, config), profiles))
    else:
        couples = [simulate_couple(p, config) for p in profiles]
    return ProtocolRun(config, couples, merge_logs(c.runtime.log for c in couples))


@dataclass(frozen=True)
class WorldSummary:
    root: Path
    sessions: int
    retained_audio: int
    reports: int
    completed_reports: int
    codes: int
    events: int


def _session_row(draft: SessionDraft, paths: Dict[str, str], audio_path: str, audio_bytes: str, sample_rate: int) -> dict:
    row = {
        "session_id": draft.session_id,
        "couple_id": draft.partner.couple_id,
        "role": draft.partner.role.value,
        "gender": draft.partner.gender.value,
        "day": draft.slot.day.isoformat(),
        "hour": draft.slot.hour,
        "window_kind": draft.slot.window_kind.value if draft.slot.window_kind else "",
        "start_offset_s": f"{draft.start_offset_s:.3f}",
        "duration_s": f"{draft.duration_s:g}",
        "trigger_kind": draft.trigger_kind.value,
        "peripheral_delay_s": f"{draft.peripheral_delay_s:.3f}",
        "audio_path": audio_path,
        "audio_bytes": audio_bytes,
        "sample_rate": sample_rate if audio_path else "",
    }
    for name in SENSOR_SERIES:
        row[f"{name}_path"] = paths.get(name, "")
    return row


def _write_couple(run: CoupleRun, repo: CorpusRepository, config: SimConfig) -> Tuple[List[dict], List[ContextCode]]:
    """Synthesize and write every session of one couple; only retained audio gets a WAV, annotation and transcripts."""
    cid, traces = run.profile.couple_id, run.traces
    faults = couple_rng(config.seed, cid, 3, 1)
    rows, codes = [], []
    for index, draft in enumerate(run.sessions):
        rng = couple_rng(config.seed, cid, 4, index)
        minute = draft.start_s / 60.0
        latent = {
            g.speaker: (
                traces.session_mean(traces.valence, g, minute, draft.duration_s),
                traces.session_mean(traces.arousal, g, minute, draft.duration_s),
            )
            for g in (Gender.MALE, Gender.FEMALE)
        }
        wearer = draft.partner.gender
        annotation = session_annotation(traces, wearer, draft.start_s, draft.duration_s, config.seed)
        non_worn = bool(faults.random() < config.faults.non_worn_rate)
        corrupt = bool(faults.random() < config.faults.corrupt_audio_rate)
        inputs = SensorInputs(
            wearer=wearer,
            duration_s=draft.duration_s,
            latent=latent,
            activity=traces.session_mean(traces.activity, wearer, minute, draft.duration_s),
            annotation=annotation,
            non_worn=non_worn,
        )
        keep_audio = draft.audio_retained and config.write_audio
        signals = synth_sensors(inputs, config, rng, with_audio=keep_audio)
        paths = repo.write_signals(
            draft.session_id,
            {"hr": signals.hr, "accel": signals.accel, "gyro": signals.gyro, "light": signals.light, "wear": signals.wear},
        )
        audio_path, audio_bytes = "", ""
        if keep_audio:
            audio_path, size = repo.write_audio(draft.session_id, signals.waveform, signals.sample_rate, truncate=corrupt)
            audio_bytes = str(size)
            repo.write_annotation(draft.session_id, annotation)
            repo.write_transcripts(draft.session_id, signals.transcripts)
            codes.append(code_from_annotation(draft.session_id, annotation, rng))
            if corrupt:
                LOGGER.debug("session %s: audio truncated", draft.session_id)
        rows.append(_session_row(draft, paths, audio_path, audio_bytes, signals.sample_rate))
    return rows, codes


def _ground_truth(run: ProtocolRun) -> pd.DataFrame:
    frames = []
    for couple in run.couples:
        for partner in (couple.profile.patient, couple.profile.support):
            valence = couple.traces.valence[partner.gender]
            frames.append(
                pd.DataFrame(
                    {
                        "minute": np.arange(valence.shape[0]),
                        "couple": couple.profile.couple_id,
                        "partner": partner.role.value,
                        "valence_latent": valence,
                        "arousal_latent": couple.traces.arousal[partner.gender],
                    }
                )
            )
    return pd.concat(frames, ignore_index=True)


def generate_world(config: SimConfig, out_dir: Path, jobs: int = 1) -> WorldSummary:
    """Simulate the study and write the complete corpus tree under ``out_dir``."""
    repo = CorpusRepository(Path(out_dir))
    try:
        repo.root.mkdir(parents=True, exist_ok=True)
        marker = repo.root / ".write_check"
        marker.write_text("", encoding="utf-8")
        marker.unlink()
    except OSError as exc:
        raise StageError("simulate", cause=exc) from exc

    run = simulate_protocol(config, jobs)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            written = list(pool.map(lambda c: _write_couple(c, repo, config), run.couples))
    else:
        written = [_write_couple(c, repo, config) for c in run.couples]

    rows = [row for couple_rows, _ in written for row in couple_rows]
    codes = [code for _, couple_codes in written for code in couple_codes]
    reports = [r for couple in run.couples for r in couple.reports.values()]
    repo.write_sessions(rows)
    repo.write_reports(reports)
    repo.write_codes(codes)
    repo.write_schedules(c.profile.schedule for c in run.couples)
    write_event_log(run.log, repo.events_log, epoch=datetime.combine(config.start_date, time()))
    repo.write_ground_truth(_ground_truth(run))

    summary = WorldSummary(
        root=repo.root,
        sessions=len(rows),
        retained_audio=sum(1 for row in rows if row["audio_path"]),
        reports=len(reports),
        completed_reports=sum(1 for r in reports if r.completed),
        codes=len(codes),
        events=len(run.log),
    )
    LOGGER.info(
        "wrote corpus %s: %d sessions, %d with audio, %d reports (%d completed), %d events",
        summary.root,
        summary.sessions,
        summary.retained_audio,
        summary.reports,
        summary.completed_reports,
        summary.events,
    )
    return summary
