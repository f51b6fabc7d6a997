import numpy as np
import pandas as pd
import pytest

from domain.models import CoupleSchedule, SelfReport, TimeSeries
from errors import CrossReferenceError, ParseError
from fixtures.study_corpus import make_code
from infrastructure.corpus_repository import SESSION_COLUMNS, CorpusRepository, read_wav, write_series, write_wav
from preprocessing import detect_corrupt_audio, expected_audio_bytes
from qa.annotation import AnnotationTrack, Segment
from selection import select_samples


def _session_row(session_id, hour=7, **overrides):
    row = {col: "" for col in SESSION_COLUMNS}
    row.update(
        session_id=session_id,
        couple_id=1,
        role="patient",
        gender="male",
        day="2021-03-01",
        hour=hour,
        window_kind="weekday_morning",
        start_offset_s="12.000",
        duration_s="300",
        trigger_kind="interaction",
        peripheral_delay_s="0.000",
        hr_path=f"corpus/{session_id}/hr.csv",
    )
    row.update(overrides)
    return row


class TestManifests:
    def test_reports_codes_schedules_round_trip(self, tmp_path):
        repo = CorpusRepository(tmp_path)
        reports = [SelfReport("s2", None, None, False, False), SelfReport("s1", 62.5, 40.0, True, True)]
        codes = [make_code("s1"), make_code("s2", female=False)]
        schedules = [CoupleSchedule(2, (6, 9), (17, 21), (8, 20)), CoupleSchedule(1, (7, 9), (18, 21), (9, 19))]
        repo.write_reports(reports)
        repo.write_codes(codes)
        repo.write_schedules(schedules)
        assert repo.load_reports() == sorted(reports, key=lambda r: r.session_id)
        assert repo.load_codes() == codes
        assert repo.load_schedules() == sorted(schedules, key=lambda s: s.couple_id)

    def test_sessions_sorted_and_parsed(self, tmp_path):
        repo = CorpusRepository(tmp_path)
        repo.write_sessions([_session_row("b"), _session_row("a", hour=13, window_kind="")])
        sessions = repo.load_sessions()
        assert [s.session_id for s in sessions] == ["a", "b"]
        assert sessions[0].slot.window_kind is None
        assert sessions[1].start_offset_s == pytest.approx(12.0)
        assert sessions[1].available == frozenset({"hr"})
        assert sessions[1].audio is None

    def test_bad_row_names_its_line(self, tmp_path):
        repo = CorpusRepository(tmp_path)
        repo.write_sessions([_session_row("a"), _session_row("b", hour=25)])
        with pytest.raises(ParseError, match=r"sessions\.csv:3"):
            repo.load_sessions()

    def test_out_of_range_report_names_its_line(self, tmp_path):
        (tmp_path / "selfreports.csv").write_text(
            "session_id,valence_raw,arousal_raw,started_within_first_window,completed\ns1,101,50,1,1\n",
            encoding="utf-8",
        )
        with pytest.raises(ParseError, match=r"selfreports\.csv:2"):
            CorpusRepository(tmp_path).load_reports()

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(ParseError, match="missing manifest"):
            CorpusRepository(tmp_path).load_corpus()

    def test_header_lacking_columns(self, tmp_path):
        (tmp_path / "sessions.csv").write_text("session_id,couple_id\ns1,1\n", encoding="utf-8")
        with pytest.raises(ParseError, match="header lacks"):
            CorpusRepository(tmp_path).load_sessions()

    def test_optional_manifests_default_empty(self, tmp_path):
        repo = CorpusRepository(tmp_path)
        assert repo.load_reports() == []
        assert repo.load_codes() == []

    def test_unknown_session_lookup(self, small_world):
        _, summary = small_world
        corpus = CorpusRepository(summary.root).load_corpus()
        with pytest.raises(CrossReferenceError):
            corpus.session("nope")


class TestSessionArtifacts:
    def test_signals_written_and_loaded(self, tmp_path):
        repo = CorpusRepository(tmp_path)
        hr = TimeSeries(np.array([0.0, 1.0, 2.5]), np.array([70.0, 72.5, 71.0]))
        accel = TimeSeries(np.array([0.0, 0.5]), np.array([[0.0, 0.0, 9.81], [0.1, 0.2, 9.7]]))
        paths = repo.write_signals("s1", {"hr": hr, "accel": accel})
        assert paths == {"hr": "corpus/s1/hr.csv", "accel": "corpus/s1/accel.csv"}
        repo.write_sessions([_session_row("s1", accel_path=paths["accel"])])
        session = repo.load_signals(repo.load_sessions()[0])
        assert np.allclose(session.hr.values, hr.values)
        assert session.accel.values.shape == (2, 3)
        assert session.gyro is None

    def test_audio_loaded_with_waveform(self, small_world):
        loaded, summary = small_world
        repo = CorpusRepository(summary.root)
        session = next(s for s in repo.load_sessions() if s.audio is not None)
        full = repo.load_signals(session)
        assert full.audio.sample_rate == loaded.sim.audio_sample_rate
        assert full.audio.waveform.shape[0] == int(loaded.sim.session_duration_s * loaded.sim.audio_sample_rate)
        assert repo.load_signals(session, with_audio=False).audio.waveform is None

    def test_annotation_and_transcripts(self, tmp_path):
        repo = CorpusRepository(tmp_path)
        assert repo.load_annotation("s1") is None
        track = AnnotationTrack((Segment(0.5, 2.0, "m"), Segment(3.0, 4.5, "f")))
        repo.write_annotation("s1", track)
        assert repo.load_annotation("s1").labels() == ["m", "f"]
        assert repo.load_transcripts("s1") == {}


class TestWav:
    def test_size_matches_pcm16_header(self, tmp_path):
        wave = 0.1 * np.sin(np.linspace(0, 100, 8000))
        assert write_wav(tmp_path / "a.wav", wave, 8000) == expected_audio_bytes(1.0, 8000)
        truncated = write_wav(tmp_path / "b.wav", wave, 8000, truncate=True)
        assert truncated == expected_audio_bytes(0.5, 8000)
        rate, data = read_wav(tmp_path / "a.wav")
        assert rate == 8000
        assert np.allclose(data, wave, atol=1e-4)

    def test_garbage_is_parse_error(self, tmp_path):
        path = tmp_path / "bad.wav"
        path.write_bytes(b"not a wav file at all")
        with pytest.raises(ParseError):
            read_wav(path)


class TestMinimalManifest:
    """Manifests carrying only identity, trigger and path columns."""

    HEADER = "session_id,couple_id,role,gender,day,hour,trigger_kind,audio_path,hr_path\n"

    def _write(self, root, rows):
        (root / "sessions.csv").write_text(self.HEADER + "".join(rows), encoding="utf-8")

    def test_missing_columns_take_defaults(self, tmp_path):
        self._write(tmp_path, ["s1,1,patient,male,2021-03-01,7,interaction,,corpus/s1/hr.csv\n"])
        (session,) = CorpusRepository(tmp_path).load_sessions()
        assert session.duration_s == pytest.approx(300.0)
        assert session.start_offset_s == 0.0
        assert session.peripheral_delay_s == 0.0
        assert session.slot.window_kind is None
        assert session.audio is None
        assert session.available == frozenset({"hr"})

    def test_audio_size_and_rate_come_from_the_file(self, tmp_path):
        write_wav(tmp_path / "corpus/s1/audio.wav", np.zeros(300 * 1000), 1000)
        write_wav(tmp_path / "corpus/s2/audio.wav", np.zeros(300 * 1000), 1000, truncate=True)
        self._write(
            tmp_path,
            [
                "s1,1,patient,male,2021-03-01,7,interaction,corpus/s1/audio.wav,\n",
                "s2,1,support_partner,female,2021-03-01,7,interaction,corpus/s2/audio.wav,\n",
            ],
        )
        full, truncated = CorpusRepository(tmp_path).load_sessions()
        assert full.audio.sample_rate == 1000
        assert full.audio.byte_size == expected_audio_bytes(300.0, 1000)
        assert detect_corrupt_audio(full.audio.byte_size, full.duration_s, full.audio.sample_rate) == "ok"
        assert truncated.audio.byte_size == expected_audio_bytes(150.0, 1000)
        assert detect_corrupt_audio(truncated.audio.byte_size, truncated.duration_s, truncated.audio.sample_rate) == "corrupt"

    def test_listed_byte_count_is_not_trusted(self, tmp_path):
        repo = CorpusRepository(tmp_path)
        path, size = repo.write_audio("s1", np.zeros(4000), 8000, truncate=True)
        repo.write_sessions([_session_row("s1", audio_path=path, audio_bytes=str(expected_audio_bytes(0.5, 8000) * 2), sample_rate="8000")])
        (session,) = repo.load_sessions()
        assert session.audio.byte_size == size

    def test_missing_audio_file_counts_as_empty(self, tmp_path):
        self._write(tmp_path, ["s1,1,patient,male,2021-03-01,7,interaction,corpus/s1/audio.wav,\n"])
        (session,) = CorpusRepository(tmp_path).load_sessions()
        assert session.audio.byte_size == 0

    def test_series_read_from_listed_path(self, tmp_path):
        repo = CorpusRepository(tmp_path)
        write_series(tmp_path / "signals/s1_hr.csv", TimeSeries(np.array([0.0, 1.0]), np.array([64.0, 66.0])), "hr")
        self._write(tmp_path, ["s1,1,patient,male,2021-03-01,7,interaction,,signals/s1_hr.csv\n"])
        session = repo.load_signals(repo.load_sessions()[0])
        assert np.allclose(session.hr.values, [64.0, 66.0])

    def test_corpus_loads_without_schedule(self, tmp_path):
        self._write(tmp_path, ["s1,1,patient,male,2021-03-01,7,interaction,,corpus/s1/hr.csv\n"])
        corpus = CorpusRepository(tmp_path).load_corpus()
        assert corpus.schedules == []
        result = select_samples(corpus.sessions, corpus.reports, corpus.codes, corpus.schedules)
        assert result.samples == []
        assert [(r.session_id, r.reason) for r in result.rejections] == [("s1", "missing_sensor")]
