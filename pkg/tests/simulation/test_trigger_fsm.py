import pytest

from domain.models import TriggerKind
from simulation.trigger_fsm import (
    SPACING_S,
    EventKind,
    FsmState,
    ProtocolEvent,
    TriggerState,
    step_trigger_fsm,
)


def ev(kind, **payload):
    return ProtocolEvent(kind, payload)


def names(actions):
    return [a.name for a in actions]


class TestCentralWatch:
    def test_hour_start_in_window_scans(self):
        state, actions = step_trigger_fsm(TriggerState("central"), ev(EventKind.HOUR_START, in_window=True), 0.0)
        assert state.state is FsmState.SCANNING
        assert actions == []

    def test_hour_start_outside_window_idles(self):
        state, _ = step_trigger_fsm(TriggerState("central"), ev(EventKind.HOUR_START, in_window=False), 0.0)
        assert state.state is FsmState.IDLE

    def test_weak_signal_keeps_scanning(self):
        s = TriggerState("central", FsmState.SCANNING, in_window=True)
        state, actions = step_trigger_fsm(s, ev(EventKind.SCAN, rssi=-80.0, threshold=-70.0), 10.0)
        assert state.state is FsmState.SCANNING
        assert actions == []

    def test_partner_in_range_requests_vad(self):
        s = TriggerState("central", FsmState.SCANNING, in_window=True)
        state, actions = step_trigger_fsm(s, ev(EventKind.SCAN, rssi=-70.0, threshold=-70.0), 10.0)
        assert state.state is FsmState.VAD_CHECK
        assert names(actions) == ["RequestVad"]

    def test_speech_starts_both_watches(self):
        s = TriggerState("central", FsmState.VAD_CHECK, in_window=True)
        state, actions = step_trigger_fsm(s, ev(EventKind.VAD_RESULT, speech=True, session_id="c01_x"), 10.0)
        assert state.state is FsmState.RECORDING
        assert state.trigger_kind is TriggerKind.INTERACTION
        assert names(actions) == ["ConnectPeripheral", "StartBoth"]

    def test_silence_returns_to_scanning(self):
        s = TriggerState("central", FsmState.VAD_CHECK, in_window=True)
        state, actions = step_trigger_fsm(s, ev(EventKind.VAD_RESULT, speech=False, session_id=None), 10.0)
        assert state.state is FsmState.SCANNING
        assert actions == []


class TestReportFlow:
    recording = TriggerState(
        "peripheral", FsmState.RECORDING, in_window=True, session_id="s1", trigger_kind=TriggerKind.INTERACTION
    )

    def test_record_end_prompts_and_starts_spacing(self):
        state, actions = step_trigger_fsm(self.recording, ev(EventKind.RECORD_END), 300.0)
        assert state.state is FsmState.AWAIT_REPORT1
        assert state.cooldown_until() == 300.0 + SPACING_S
        assert names(actions) == ["PromptReport"]

    def test_completed_report_enters_cooldown_and_marks_hour(self):
        state, _ = step_trigger_fsm(self.recording, ev(EventKind.RECORD_END), 300.0)
        state, _ = step_trigger_fsm(state, ev(EventKind.REPORT_STARTED), 320.0)
        state, _ = step_trigger_fsm(state, ev(EventKind.REPORT_COMPLETED), 350.0)
        assert state.state is FsmState.COOLDOWN
        assert state.triggered_this_hour
        assert state.retained_audio_id == "s1"

    def test_two_timeouts_delete_interaction_audio(self):
        state, _ = step_trigger_fsm(self.recording, ev(EventKind.RECORD_END), 300.0)
        state, actions = step_trigger_fsm(state, ev(EventKind.TIMEOUT), 420.0)
        assert state.state is FsmState.AWAIT_REPORT2
        assert names(actions) == ["Vibrate2"]
        state, actions = step_trigger_fsm(state, ev(EventKind.TIMEOUT), 540.0)
        assert names(actions) == ["DismissReport", "DeleteAudio"]
        assert actions[1].payload["keep_sensors"] is True
        assert state.state is FsmState.IDLE
        assert not state.triggered_this_hour

    def test_unanswered_backup_keeps_audio(self):
        backup = TriggerState("central", FsmState.AWAIT_REPORT2, in_window=True, session_id="b1",
                              trigger_kind=TriggerKind.BACKUP, last_recording_end=3000.0)
        state, actions = step_trigger_fsm(backup, ev(EventKind.TIMEOUT), 3240.0)
        assert names(actions) == ["DismissReport"]
        assert state.retained_audio_id == "b1"
        assert state.state is FsmState.COOLDOWN


class TestBackup:
    def test_armed_when_no_interaction_this_hour(self):
        s = TriggerState("central", FsmState.COOLDOWN, in_window=True, last_recording_end=2000.0)
        state, actions = step_trigger_fsm(s, ev(EventKind.BACKUP_CHECK), 2700.0)
        assert state.state is FsmState.BACKUP_ARMED
        assert actions[0].payload["at"] == 2000.0 + SPACING_S

    def test_not_armed_after_interaction(self):
        s = TriggerState("central", FsmState.COOLDOWN, in_window=True, triggered_this_hour=True, last_recording_end=2000.0)
        state, actions = step_trigger_fsm(s, ev(EventKind.BACKUP_CHECK), 2700.0)
        assert state.state is FsmState.COOLDOWN
        assert actions == []

    def test_arming_skipped_when_spacing_runs_past_the_hour(self):
        s = TriggerState("central", FsmState.COOLDOWN, in_window=True, last_recording_end=2500.0)
        state, actions = step_trigger_fsm(s, ev(EventKind.BACKUP_CHECK), 2700.0)
        assert state.state is FsmState.COOLDOWN
        assert actions == []

    @pytest.mark.parametrize(
        "busy", [FsmState.VAD_CHECK, FsmState.RECORDING, FsmState.AWAIT_REPORT1, FsmState.AWAIT_REPORT2]
    )
    def test_check_while_busy_is_held(self, busy):
        s = TriggerState("central", busy, in_window=True, session_id="s1", trigger_kind=TriggerKind.INTERACTION)
        state, actions = step_trigger_fsm(s, ev(EventKind.BACKUP_CHECK), 2700.0)
        assert actions == []
        assert state.state is busy
        assert state.backup_pending

    def test_held_check_cancelled_by_completed_report(self):
        s = TriggerState("central", FsmState.AWAIT_REPORT1, in_window=True, session_id="s1",
                         trigger_kind=TriggerKind.INTERACTION, last_recording_end=2640.0,
                         report_started=True, backup_pending=True)
        state, actions = step_trigger_fsm(s, ev(EventKind.REPORT_COMPLETED), 2720.0)
        assert actions == []
        assert state.triggered_this_hour
        assert not state.backup_pending

    def test_held_check_after_dismissal_cannot_fit_spacing(self):
        s = TriggerState("central", FsmState.AWAIT_REPORT2, in_window=True, session_id="s1",
                         trigger_kind=TriggerKind.INTERACTION, last_recording_end=2640.0, backup_pending=True)
        state, actions = step_trigger_fsm(s, ev(EventKind.TIMEOUT), 2880.0)
        assert names(actions) == ["DismissReport", "DeleteAudio"]
        assert state.state is FsmState.IDLE
        assert not state.backup_pending

    def test_held_check_arms_after_silent_vad(self):
        s = TriggerState("central", FsmState.VAD_CHECK, in_window=True, backup_pending=True)
        state, actions = step_trigger_fsm(s, ev(EventKind.VAD_RESULT, speech=False, session_id=None), 2700.0)
        assert state.state is FsmState.BACKUP_ARMED
        assert names(actions) == ["ArmBackup"]
        assert actions[0].payload["at"] == 2700.0

    def test_backup_due_starts_recording(self):
        s = TriggerState("peripheral", FsmState.BACKUP_ARMED, in_window=True)
        state, actions = step_trigger_fsm(s, ev(EventKind.BACKUP_DUE, session_id="b1"), 2700.0)
        assert state.trigger_kind is TriggerKind.BACKUP
        assert names(actions) == ["StartBackup"]


class TestProtocolErrors:
    @pytest.mark.parametrize(
        "state,event",
        [
            (TriggerState("central"), ev(EventKind.RECORD_END)),
            (TriggerState("peripheral", FsmState.SCANNING), ev(EventKind.SCAN, rssi=-50.0, threshold=-70.0)),
            (TriggerState("central", FsmState.SCANNING), ev(EventKind.REMOTE_START, session_id="x")),
            (TriggerState("central", FsmState.AWAIT_REPORT1), ev(EventKind.REPORT_COMPLETED)),
        ],
    )
    def test_invalid_transition_leaves_state_unchanged(self, state, event):
        after, actions = step_trigger_fsm(state, event, 5.0)
        assert after == state
        assert names(actions) == ["ProtocolError"]
        assert actions[0].payload["event"] == event.kind.value
