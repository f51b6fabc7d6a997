"""Per-watch trigger state machine for the two-step recording protocol.

The central (patient) watch scans for the partner's watch, runs the VAD gate
and starts both recordings; the peripheral watch follows a remote start. Both
watches then run their own self-report flow and cooldown. A watch that has no
completed interaction by minute 45 arms a backup recording. A check that lands
while an interaction is still recording or awaiting its report is held until
the report resolves: a completed report cancels it, a dismissed one arms the
backup if the spacing still fits inside the hour.

``step_trigger_fsm`` is pure: it maps (state, event, clock) to the next state
and the actions the simulator must carry out. Transitions that are not in the
table leave the state unchanged and return a single ``ProtocolError`` action.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

from domain.models import TriggerKind
from errors import ProtocolError

SESSION_S = 300.0
FIRST_PROMPT_S = 120.0
SECOND_PROMPT_S = 120.0
SPACING_S = 20 * 60.0
BACKUP_MINUTE = 45
PERIPHERAL_DELAY_MAX_S = 10.0
HOUR_S = 3600.0
# Latest interaction start whose unanswered report still leaves room for a
# spaced backup before the hour ends.
INTERACTION_CUTOFF_S = HOUR_S - SPACING_S - SESSION_S - PERIPHERAL_DELAY_MAX_S


class FsmState(str, Enum):
    IDLE = "Idle"
    SCANNING = "Scanning"
    VAD_CHECK = "VadCheck"
    RECORDING = "Recording"
    AWAIT_REPORT1 = "AwaitReport1"
    AWAIT_REPORT2 = "AwaitReport2"
    COOLDOWN = "Cooldown"
    BACKUP_ARMED = "BackupArmed"


class EventKind(str, Enum):
    HOUR_START = "HourStart"
    SCAN = "Scan"
    VAD_RESULT = "VadResult"
    REMOTE_START = "RemoteStart"
    RECORD_END = "RecordEnd"
    REPORT_STARTED = "ReportStarted"
    REPORT_COMPLETED = "ReportCompleted"
    TIMEOUT = "Timeout"
    COOLDOWN_EXPIRED = "CooldownExpired"
    BACKUP_CHECK = "BackupCheck"
    BACKUP_DUE = "BackupDue"
    HOUR_END = "HourEnd"


@dataclass(frozen=True)
class ProtocolEvent:
    kind: EventKind
    payload: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Action:
    name: str
    payload: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class TriggerState:
    watch: str
    state: FsmState = FsmState.IDLE
    hour_start: float = 0.0
    in_window: bool = False
    triggered_this_hour: bool = False
    last_recording_end: Optional[float] = None
    retained_audio_id: Optional[str] = None
    session_id: Optional[str] = None
    trigger_kind: Optional[TriggerKind] = None
    report_started: bool = False
    backup_pending: bool = False

    def cooldown_until(self) -> float:
        return float("-inf") if self.last_recording_end is None else self.last_recording_end + SPACING_S

    def cooling(self, clock: float) -> bool:
        return clock < self.cooldown_until()

    def ready_state(self, clock: float) -> FsmState:
        if self.cooling(clock):
            return FsmState.COOLDOWN
        return FsmState.SCANNING if self.in_window else FsmState.IDLE


Step = Tuple[TriggerState, List[Action]]
Handler = Callable[[TriggerState, ProtocolEvent, float], Step]


def _hour_start(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    s = replace(
        s,
        hour_start=clock,
        in_window=bool(event.payload.get("in_window", False)),
        triggered_this_hour=False,
        retained_audio_id=None,
        backup_pending=False,
    )
    if s.state in (FsmState.IDLE, FsmState.SCANNING):
        s = replace(s, state=s.ready_state(clock))
    return s, []


def _scan(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    if s.watch != "central":
        raise ProtocolError("only the central watch scans")
    if event.payload["rssi"] >= event.payload["threshold"]:
        return replace(s, state=FsmState.VAD_CHECK), [Action("RequestVad")]
    return s, []


def _vad_result(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    if not event.payload["speech"]:
        s = replace(s, state=FsmState.SCANNING)
        return _arm_backup(s, clock) if s.backup_pending else (s, [])
    sid = event.payload["session_id"]
    s = replace(
        s,
        state=FsmState.RECORDING,
        session_id=sid,
        trigger_kind=TriggerKind.INTERACTION,
        report_started=False,
    )
    return s, [Action("ConnectPeripheral", {"session_id": sid}), Action("StartBoth", {"session_id": sid})]


def _remote_start(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    if s.watch != "peripheral":
        raise ProtocolError("remote start sent to the central watch")
    sid = event.payload["session_id"]
    s = replace(
        s,
        state=FsmState.RECORDING,
        session_id=sid,
        trigger_kind=TriggerKind.INTERACTION,
        report_started=False,
    )
    return s, [Action("StartRecording", {"session_id": sid, "delay": event.payload.get("delay", 0.0)})]


def _record_end(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    s = replace(s, state=FsmState.AWAIT_REPORT1, last_recording_end=clock)
    return s, [Action("PromptReport", {"session_id": s.session_id})]


def _report_started(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    return replace(s, report_started=True), []


def _report_completed(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    if not s.report_started:
        raise ProtocolError("report completed before it was started")
    interaction = s.trigger_kind is TriggerKind.INTERACTION
    s = replace(
        s,
        state=s.ready_state(clock),
        retained_audio_id=s.session_id,
        triggered_this_hour=s.triggered_this_hour or interaction,
        report_started=False,
    )
    if s.backup_pending and not s.triggered_this_hour:
        return _arm_backup(s, clock)
    return replace(s, backup_pending=False), []


def _timeout_first(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    return replace(s, state=FsmState.AWAIT_REPORT2), [Action("Vibrate2", {"session_id": s.session_id})]


def _timeout_second(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    sid = s.session_id
    actions = [Action("DismissReport", {"session_id": sid})]
    if s.trigger_kind is TriggerKind.INTERACTION:
        actions.append(Action("DeleteAudio", {"session_id": sid, "keep_sensors": True}))
        # The watch rests until the spacing rule allows the next scan.
        s = replace(s, state=FsmState.IDLE)
    else:
        s = replace(s, state=s.ready_state(clock), retained_audio_id=sid)
    s = replace(s, report_started=False)
    if s.backup_pending:
        s, armed = _arm_backup(s, clock)
        actions.extend(armed)
    return s, actions


def _cooldown_expired(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    if s.cooling(clock):
        return s, []
    return replace(s, state=FsmState.SCANNING if s.in_window else FsmState.IDLE), []


def _cooldown_expired_armed(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    return s, []


def _backup_check(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    if not s.in_window or s.triggered_this_hour:
        return s, []
    return _arm_backup(s, clock)


def _backup_check_busy(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    if not s.in_window or s.triggered_this_hour:
        return s, []
    return replace(s, backup_pending=True), []


def _arm_backup(s: TriggerState, clock: float) -> Step:
    s = replace(s, backup_pending=False)
    due = max(clock, s.cooldown_until())
    if due >= s.hour_start + HOUR_S:
        # Spacing pushes the backup out of the hour; the hour stays without one.
        return s, []
    return replace(s, state=FsmState.BACKUP_ARMED), [Action("ArmBackup", {"at": due})]


def _backup_due(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    if s.cooling(clock):
        raise ProtocolError("backup due during cooldown")
    sid = event.payload["session_id"]
    s = replace(
        s,
        state=FsmState.RECORDING,
        session_id=sid,
        trigger_kind=TriggerKind.BACKUP,
        report_started=False,
    )
    return s, [Action("StartBackup", {"session_id": sid})]


def _hour_end(s: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    return s, [Action("ApplyRetention", {"hour_start": s.hour_start})]


_ANY = None

TRANSITIONS: Dict[Tuple[Optional[FsmState], EventKind], Handler] = {
    (_ANY, EventKind.HOUR_START): _hour_start,
    (_ANY, EventKind.HOUR_END): _hour_end,
    (FsmState.SCANNING, EventKind.SCAN): _scan,
    (FsmState.VAD_CHECK, EventKind.VAD_RESULT): _vad_result,
    (FsmState.SCANNING, EventKind.REMOTE_START): _remote_start,
    (FsmState.RECORDING, EventKind.RECORD_END): _record_end,
    (FsmState.AWAIT_REPORT1, EventKind.REPORT_STARTED): _report_started,
    (FsmState.AWAIT_REPORT2, EventKind.REPORT_STARTED): _report_started,
    (FsmState.AWAIT_REPORT1, EventKind.REPORT_COMPLETED): _report_completed,
    (FsmState.AWAIT_REPORT2, EventKind.REPORT_COMPLETED): _report_completed,
    (FsmState.AWAIT_REPORT1, EventKind.TIMEOUT): _timeout_first,
    (FsmState.AWAIT_REPORT2, EventKind.TIMEOUT): _timeout_second,
    (FsmState.COOLDOWN, EventKind.COOLDOWN_EXPIRED): _cooldown_expired,
    (FsmState.IDLE, EventKind.COOLDOWN_EXPIRED): _cooldown_expired,
    (FsmState.SCANNING, EventKind.COOLDOWN_EXPIRED): _cooldown_expired,
    (FsmState.BACKUP_ARMED, EventKind.COOLDOWN_EXPIRED): _cooldown_expired_armed,
    (FsmState.SCANNING, EventKind.BACKUP_CHECK): _backup_check,
    (FsmState.IDLE, EventKind.BACKUP_CHECK): _backup_check,
    (FsmState.COOLDOWN, EventKind.BACKUP_CHECK): _backup_check,
    (FsmState.VAD_CHECK, EventKind.BACKUP_CHECK): _backup_check_busy,
    (FsmState.RECORDING, EventKind.BACKUP_CHECK): _backup_check_busy,
    (FsmState.AWAIT_REPORT1, EventKind.BACKUP_CHECK): _backup_check_busy,
    (FsmState.AWAIT_REPORT2, EventKind.BACKUP_CHECK): _backup_check_busy,
    (FsmState.BACKUP_ARMED, EventKind.BACKUP_DUE): _backup_due,
}


def step_trigger_fsm(state: TriggerState, event: ProtocolEvent, clock: float) -> Step:
    handler = TRANSITIONS.get((state.state, event.kind)) or TRANSITIONS.get((_ANY, event.kind))
    if handler is None:
        detail = f"{event.kind.value} not allowed in {state.state.value} on {state.watch} watch"
        return state, [Action("ProtocolError", {"detail": detail, "event": event.kind.value})]
    try:
        return handler(state, event, clock)
    except ProtocolError as exc:
        return state, [Action("ProtocolError", {"detail": str(exc), "event": event.kind.value})]
