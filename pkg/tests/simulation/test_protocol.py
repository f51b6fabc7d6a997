"""One-hour protocol runs against fixed traces."""

import numpy as np
import pytest

from domain.config_models import PathLossParams, SimConfig
from domain.models import TriggerKind
from simulation.event_log import replay
from simulation.traces import HourTraces
from simulation.trigger_fsm import PERIPHERAL_DELAY_MAX_S, SPACING_S
from simulation.world import ProtocolRuntime, hour_clock, make_couples, run_hour

DAY, HOUR = 0, 7  # Monday, inside the default weekday morning window


def runtime_for(compliance, seed=0):
    config = SimConfig(n_couples=1, days=1, compliance=compliance, path_loss=PathLossParams(noise_sd_db=0.0))
    profile = make_couples(config)[0]
    return ProtocolRuntime(profile, config, np.random.default_rng(seed))


def by_watch(runtime):
    out = {"central": [], "peripheral": []}
    for draft in sorted(runtime.sessions.values(), key=lambda d: d.start_s):
        out[draft.watch].append(draft)
    return out


def assert_protocol_invariants(runtime):
    assert runtime.log.of_kind("ProtocolError") == []
    for drafts in by_watch(runtime).values():
        for prev, nxt in zip(drafts, drafts[1:]):
            assert nxt.start_s >= prev.start_s + prev.duration_s + SPACING_S - 1e-6
        assert sum(d.audio_retained for d in drafts) <= 1


class TestTogetherAndTalking:
    @pytest.fixture
    def runtime(self):
        runtime = runtime_for(compliance=1.0)
        run_hour(runtime, DAY, HOUR, HourTraces.constant(1.0, range(60)))
        runtime.drain()
        return runtime

    def test_interactions_recorded_on_both_watches(self, runtime):
        watches = by_watch(runtime)
        assert watches["central"]
        assert len(watches["central"]) == len(watches["peripheral"])
        assert all(d.trigger_kind is TriggerKind.INTERACTION for d in runtime.sessions.values())

    def test_peripheral_follows_within_delay(self, runtime):
        watches = by_watch(runtime)
        for central, peripheral in zip(watches["central"], watches["peripheral"]):
            assert 0.0 <= peripheral.peripheral_delay_s <= PERIPHERAL_DELAY_MAX_S
            assert peripheral.start_s == pytest.approx(central.start_s + peripheral.peripheral_delay_s)

    def test_spacing_and_single_retained_audio(self, runtime):
        assert_protocol_invariants(runtime)
        for drafts in by_watch(runtime).values():
            assert drafts[-1].audio_retained
            assert not any(d.audio_retained for d in drafts[:-1])

    def test_interactions_stop_before_backup_window(self, runtime):
        start = hour_clock(DAY, HOUR)
        assert all(d.start_s - start < 34 * 60 + PERIPHERAL_DELAY_MAX_S for d in runtime.sessions.values())

    def test_every_interaction_has_completed_report(self, runtime):
        assert all(runtime.reports[sid].completed for sid in runtime.sessions)

    def test_replay_agrees_with_runtime(self, runtime):
        replayed = replay(runtime.log)
        for sid, draft in runtime.sessions.items():
            expected = "retained" if draft.audio_retained else "deleted"
            assert replayed[sid].audio == expected


def test_apart_all_hour_arms_backup_on_each_watch():
    runtime = runtime_for(compliance=1.0)
    run_hour(runtime, DAY, HOUR, HourTraces.constant(50.0, range(60)))
    runtime.drain()
    assert_protocol_invariants(runtime)
    drafts = list(runtime.sessions.values())
    assert sorted(d.watch for d in drafts) == ["central", "peripheral"]
    start = hour_clock(DAY, HOUR)
    for draft in drafts:
        assert draft.trigger_kind is TriggerKind.BACKUP
        assert draft.start_s - start >= 45 * 60
        assert draft.audio_retained


def test_speech_only_after_cutoff_falls_back_to_backup():
    runtime = runtime_for(compliance=1.0)
    run_hour(runtime, DAY, HOUR, HourTraces.constant(1.0, range(35, 45)))
    runtime.drain()
    assert_protocol_invariants(runtime)
    drafts = list(runtime.sessions.values())
    assert sorted(d.watch for d in drafts) == ["central", "peripheral"]
    start = hour_clock(DAY, HOUR)
    for draft in drafts:
        assert draft.trigger_kind is TriggerKind.BACKUP
        assert 45 * 60 <= draft.start_s - start < 60 * 60
        assert draft.audio_retained


def test_last_allowed_interaction_still_leaves_room_for_backup():
    runtime = runtime_for(compliance=0.0)
    run_hour(runtime, DAY, HOUR, HourTraces.constant(1.0, [34]))
    runtime.drain()
    assert_protocol_invariants(runtime)
    start = hour_clock(DAY, HOUR)
    kinds = sorted((d.watch, d.trigger_kind.value) for d in runtime.sessions.values())
    assert kinds == [("central", "backup"), ("central", "interaction"), ("peripheral", "backup"), ("peripheral", "interaction")]
    for draft in runtime.sessions.values():
        if draft.trigger_kind is TriggerKind.BACKUP:
            assert 45 * 60 <= draft.start_s - start < 60 * 60
            assert draft.audio_retained


def test_together_but_silent_records_nothing_but_backup():
    runtime = runtime_for(compliance=1.0)
    run_hour(runtime, DAY, HOUR, HourTraces.constant(1.0, ()))
    runtime.drain()
    assert {d.trigger_kind for d in runtime.sessions.values()} == {TriggerKind.BACKUP}
    assert runtime.log.of_kind("VadNegative")


def test_unanswered_reports_delete_interaction_audio_and_fall_back_to_backup():
    runtime = runtime_for(compliance=0.0)
    run_hour(runtime, DAY, HOUR, HourTraces.constant(1.0, range(60)))
    runtime.drain()
    assert_protocol_invariants(runtime)
    drafts = list(runtime.sessions.values())
    interactions = [d for d in drafts if d.trigger_kind is TriggerKind.INTERACTION]
    backups = [d for d in drafts if d.trigger_kind is TriggerKind.BACKUP]
    assert interactions
    assert not any(d.audio_kept for d in interactions)
    assert sorted(d.watch for d in backups) == ["central", "peripheral"]
    assert all(d.audio_retained for d in backups)
    assert not any(r.completed for r in runtime.reports.values())


def test_hour_outside_window_records_nothing():
    runtime = runtime_for(compliance=1.0)
    run_hour(runtime, DAY, 13, HourTraces.constant(1.0, range(60)))
    runtime.drain()
    assert runtime.sessions == {}


def test_forced_collection_outside_window_keeps_slot_unmarked():
    runtime = runtime_for(compliance=1.0)
    result = run_hour(runtime, DAY, 13, HourTraces.constant(1.0, range(60)), in_window=True)
    assert result.sessions
    assert all(d.slot.window_kind is None for d in result.sessions)
