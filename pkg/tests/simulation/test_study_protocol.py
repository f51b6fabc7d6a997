"""Full-size studies read back from disk and checked against the trigger protocol."""

from collections import defaultdict
from dataclasses import replace
from datetime import timedelta
from pathlib import Path

import pytest

from domain.models import TriggerKind
from infrastructure.config_loader import load_config
from infrastructure.corpus_repository import CorpusRepository
from simulation.event_log import read_event_log, replay
from simulation.trigger_fsm import (
    BACKUP_MINUTE,
    HOUR_S,
    SPACING_S,
    EventKind,
    FsmState,
    ProtocolEvent,
    TriggerState,
    step_trigger_fsm,
)
from simulation.world import generate_world, simulate_protocol

pytestmark = pytest.mark.slow

SIM_YML = Path(__file__).resolve().parents[2] / "config" / "sim.yml"
SEEDS = (1, 2, 3, 4, 5)

# Logged session event -> FSM input that produced it.
FSM_INPUTS = {
    "RecordEnd": EventKind.RECORD_END,
    "Vibrate2": EventKind.TIMEOUT,
    "ReportStarted": EventKind.REPORT_STARTED,
    "ReportCompleted": EventKind.REPORT_COMPLETED,
    "ReportDismissed": EventKind.TIMEOUT,
}


def _study_config(seed):
    sim = load_config(SIM_YML).sim
    assert (sim.n_couples, sim.days) == (13, 7)
    return replace(sim, seed=seed, write_audio=False, imu_rate_hz=1.0)


@pytest.fixture(scope="module", params=SEEDS, ids=lambda s: f"seed{s}")
def study(request, tmp_path_factory):
    config = _study_config(request.param)
    summary = generate_world(config, tmp_path_factory.mktemp(f"study{request.param}"))
    repo = CorpusRepository(summary.root)
    log = read_event_log(repo.events_log)
    return config, repo.load_corpus(), log, replay(log)


def _watch_hour(session):
    return (session.partner.couple_id, session.partner.watch, session.slot.day, session.slot.hour)


def _session_events(log):
    by_session = defaultdict(list)
    for record in log:
        sid = record.payload.get("session_id")
        if sid is not None:
            by_session[sid].append(record)
    return by_session


def test_log_matches_a_fresh_run_of_the_protocol(study):
    config, _, log, _ = study
    fresh = simulate_protocol(config).log
    assert [r.to_json() for r in log] == [r.to_json() for r in fresh]


def test_log_holds_no_protocol_errors(study):
    _, _, log, _ = study
    assert log.of_kind("ProtocolError") == []


def test_replay_agrees_with_session_manifest(study):
    config, corpus, _, replayed = study
    assert {s.session_id for s in corpus.sessions} == set(replayed)
    for session in corpus.sessions:
        state = replayed[session.session_id]
        assert state.couple == session.partner.couple_id
        assert state.watch == session.partner.watch
        assert state.trigger_kind == session.trigger_kind.value
        day_s = (session.slot.day - config.start_date).days * 86400.0
        assert state.start_s == pytest.approx(day_s + session.slot.hour * HOUR_S + session.start_offset_s, abs=2e-3)


def test_replay_agrees_with_selfreports(study):
    _, corpus, _, replayed = study
    completed = {r.session_id for r in corpus.reports if r.completed}
    assert completed == {sid for sid, s in replayed.items() if s.report == "completed"}
    for report in corpus.reports:
        if report.completed:
            state = replayed[report.session_id]
            assert (state.valence_raw, state.arousal_raw) == (report.valence_raw, report.arousal_raw)


def test_each_session_replays_through_the_state_machine(study):
    _, _, log, replayed = study
    for sid, records in _session_events(log).items():
        if sid not in replayed:
            # armed backups that never started
            assert {r.event for r in records} == {"BackupArmed"}
            continue
        start = replayed[sid]
        kind = TriggerKind(start.trigger_kind)
        s = TriggerState(start.watch, state=FsmState.RECORDING, session_id=sid, trigger_kind=kind)
        expected_deletes = 0
        for record in records:
            if record.event == "AudioDeleted" and record.payload["reason"] == "report_not_completed":
                expected_deletes += 1
            if record.event not in FSM_INPUTS:
                continue
            s, actions = step_trigger_fsm(s, ProtocolEvent(FSM_INPUTS[record.event], dict(record.payload)), record.time_s)
            names = [a.name for a in actions]
            assert "ProtocolError" not in names, sid
            if record.event == "RecordEnd":
                assert names == ["PromptReport"], sid
            elif record.event == "Vibrate2":
                assert names == ["Vibrate2"], sid
            elif record.event == "ReportDismissed":
                assert names[0] == "DismissReport", sid
                assert ("DeleteAudio" in names) == (kind is TriggerKind.INTERACTION), sid
        assert s.state not in (FsmState.RECORDING, FsmState.AWAIT_REPORT1, FsmState.AWAIT_REPORT2), sid
        assert expected_deletes == int(start.report == "dismissed" and kind is TriggerKind.INTERACTION), sid


def test_armed_backups_start_when_due(study):
    _, _, log, replayed = study
    started = {sid: s.start_s for sid, s in replayed.items() if s.trigger_kind == "backup"}
    due = {r.payload["session_id"]: r.payload["due_s"] for r in log.of_kind("BackupArmed")}
    assert set(started) <= set(due)
    for sid, start_s in started.items():
        assert start_s == pytest.approx(due[sid], abs=1e-3)


def test_spacing_holds_per_watch(study):
    config, corpus, _, _ = study
    starts = defaultdict(list)
    for session in corpus.sessions:
        day_s = (session.slot.day - config.start_date).days * 86400.0
        starts[(session.partner.couple_id, session.partner.watch)].append(
            day_s + session.slot.hour * HOUR_S + session.start_offset_s
        )
    for values in starts.values():
        values.sort()
        for prev, nxt in zip(values, values[1:]):
            assert nxt - prev >= config.session_duration_s + SPACING_S - 2e-3


def test_retained_audio_follows_retention_rules(study):
    _, corpus, _, replayed = study
    kept = defaultdict(int)
    for session in corpus.sessions:
        state = replayed[session.session_id]
        if state.audio != "retained":
            continue
        kept[_watch_hour(session)] += 1
        if session.trigger_kind is TriggerKind.INTERACTION:
            assert state.report == "completed", session.session_id
    assert kept and max(kept.values()) == 1


def test_backup_recorded_iff_no_answered_interaction(study):
    config, corpus, _, replayed = study
    hours = defaultdict(list)
    for schedule in corpus.schedules:
        for day_index in range(config.days):
            day = config.start_date + timedelta(days=day_index)
            for hour in schedule.hours_for(day):
                for watch in ("central", "peripheral"):
                    hours.setdefault((schedule.couple_id, watch, day, hour), [])
    for session in corpus.sessions:
        hours[_watch_hour(session)].append(session)
    assert hours
    for key, sessions in hours.items():
        answered = any(
            s.trigger_kind is TriggerKind.INTERACTION and replayed[s.session_id].report == "completed" for s in sessions
        )
        backups = [s for s in sessions if s.trigger_kind is TriggerKind.BACKUP]
        assert len(backups) == (0 if answered else 1), key
        for backup in backups:
            assert BACKUP_MINUTE * 60.0 <= backup.start_offset_s < HOUR_S, key
