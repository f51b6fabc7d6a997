"""On-disk corpus layout: per-session signal folders plus the CSV manifests that tie them together.

    <root>/corpus/<session_id>/{audio.wav, hr.csv, accel.csv, gyro.csv, light.csv, wear.csv,
                               annotation.txt, transcript_m.txt, transcript_f.txt}
    <root>/sessions.csv, selfreports.csv, codes.csv, schedule.csv, events.log, ground_truth.csv
"""

from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.io import wavfile

from domain.models import (
    NOMINAL_DURATION_S,
    SENSOR_SERIES,
    AudioRef,
    ContextCode,
    CoupleSchedule,
    Gender,
    HourSlot,
    PartnerRef,
    RecordingSession,
    Role,
    SelfReport,
    TimeSeries,
    TriggerKind,
    WindowKind,
)
from errors import CrossReferenceError, DyadError, ParseError
from infrastructure.parsers.parser_factory import ParserFactory
from infrastructure.parsers.series_parser import SERIES_COLUMNS
from logging_config import get_logger
from qa.annotation import AnnotationTrack, format_annotation
from qa.transcript import Transcript, format_transcript

LOGGER = get_logger("corpus_repository")

FLOAT_FORMAT = "%.6f"
SESSION_DIR = "corpus"

SESSION_COLUMNS = (
    "session_id",
    "couple_id",
    "role",
    "gender",
    "day",
    "hour",
    "window_kind",
    "start_offset_s",
    "duration_s",
    "trigger_kind",
    "peripheral_delay_s",
    "audio_path",
    "audio_bytes",
    "sample_rate",
) + tuple(f"{name}_path" for name in SENSOR_SERIES)
# Columns every sessions manifest must carry; the rest default or come from the files.
REQUIRED_SESSION_COLUMNS = (
    "session_id",
    "couple_id",
    "role",
    "gender",
    "day",
    "hour",
    "trigger_kind",
    "audio_path",
)
DEFAULT_SAMPLE_RATE = 44100
REPORT_COLUMNS = ("session_id", "valence_raw", "arousal_raw", "started_within_first_window", "completed")
CODE_COLUMNS = (
    "session_id",
    "speech_present",
    "male_spoke",
    "female_spoke",
    "conversation",
    "partner_conversation",
    "interaction_partner",
    "location",
    "activity",
    "conversation_type",
)
SCHEDULE_COLUMNS = (
    "couple_id",
    "weekday_morning_start",
    "weekday_morning_end",
    "weekday_evening_start",
    "weekday_evening_end",
    "weekend_start",
    "weekend_end",
)
GROUND_TRUTH_COLUMNS = ("minute", "couple", "partner", "valence_latent", "arousal_latent")

_TRUE = {"1", "true", "yes"}


def _flag(raw: str) -> bool:
    return str(raw).strip().lower() in _TRUE


def _opt_float(raw: str) -> Optional[float]:
    raw = str(raw).strip()
    return float(raw) if raw else None


def write_series(path: Path, series: TimeSeries, name: str) -> None:
    columns = SERIES_COLUMNS[name]
    values = np.asarray(series.values)
    data = {"t": np.asarray(series.t, dtype=np.float64)}
    if values.ndim == 1:
        data[columns[1]] = values
    else:
        for i, col in enumerate(columns[1:]):
            data[col] = values[:, i]
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(data, columns=list(columns)).to_csv(path, index=False, float_format=FLOAT_FORMAT)


def write_wav(path: Path, waveform: np.ndarray, sample_rate: int, truncate: bool = False) -> int:
    """Mono PCM16; ``truncate`` keeps only the first half of the samples. Returns the file size."""
    pcm = np.round(np.clip(waveform, -1.0, 1.0) * 32767.0).astype(np.int16)
    if truncate:
        pcm = pcm[: pcm.shape[0] // 2]
    path.parent.mkdir(parents=True, exist_ok=True)
    wavfile.write(str(path), int(sample_rate), pcm)
    return path.stat().st_size


def read_wav(path: Path) -> Tuple[int, np.ndarray]:
    try:
        rate, data = wavfile.read(str(path))
    except (ValueError, OSError) as exc:
        raise ParseError(f"{path}: unreadable WAV ({exc})") from exc
    if data.ndim > 1:
        data = data.mean(axis=1)
    if np.issubdtype(data.dtype, np.integer):
        data = data.astype(np.float64) / float(np.iinfo(data.dtype).max)
    return int(rate), np.asarray(data, dtype=np.float64)


def wav_sample_rate(path: Path) -> int:
    """Sample rate from the WAV header; samples are memory-mapped, not read."""
    try:
        rate, _ = wavfile.read(str(path), mmap=True)
    except (ValueError, OSError) as exc:
        raise ParseError(f"{path}: unreadable WAV ({exc})") from exc
    return int(rate)


@dataclass
class Corpus:
    root: Path
    sessions: List[RecordingSession] = field(default_factory=list)
    reports: List[SelfReport] = field(default_factory=list)
    codes: List[ContextCode] = field(default_factory=list)
    schedules: List[CoupleSchedule] = field(default_factory=list)

    def session(self, session_id: str) -> RecordingSession:
        for s in self.sessions:
            if s.session_id == session_id:
                return s
        raise CrossReferenceError(f"unknown session {session_id}")


class CorpusRepository:
    """Reads and writes one corpus tree rooted at ``root``."""

    def __init__(self, root: Path):
        self.root = Path(root)

    # -- paths --------------------------------------------------------------
    def session_dir(self, session_id: str) -> Path:
        return self.root / SESSION_DIR / session_id

    def relative(self, path: Path) -> str:
        return path.relative_to(self.root).as_posix()

    @property
    def sessions_csv(self) -> Path:
        return self.root / "sessions.csv"

    @property
    def reports_csv(self) -> Path:
        return self.root / "selfreports.csv"

    @property
    def codes_csv(self) -> Path:
        return self.root / "codes.csv"

    @property
    def schedule_csv(self) -> Path:
        return self.root / "schedule.csv"

    @property
    def events_log(self) -> Path:
        return self.root / "events.log"

    @property
    def ground_truth_csv(self) -> Path:
        return self.root / "ground_truth.csv"

    # -- per-session artifacts ---------------------------------------------
    def write_signals(self, session_id: str, series: Mapping[str, TimeSeries]) -> Dict[str, str]:
        paths = {}
        for name in SENSOR_SERIES:
            if name in series and series[name] is not None:
                path = self.session_dir(session_id) / f"{name}.csv"
                write_series(path, series[name], name)
                paths[name] = self.relative(path)
        return paths

    def write_audio(self, session_id: str, waveform: np.ndarray, sample_rate: int, truncate: bool = False) -> Tuple[str, int]:
        path = self.session_dir(session_id) / "audio.wav"
        size = write_wav(path, waveform, sample_rate, truncate)
        return self.relative(path), size

    def write_annotation(self, session_id: str, track: AnnotationTrack) -> None:
        path = self.session_dir(session_id) / "annotation.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(format_annotation(track), encoding="utf-8", newline="\n")

    def write_transcripts(self, session_id: str, transcripts: Mapping[str, Transcript]) -> None:
        for speaker, transcript in sorted(transcripts.items()):
            path = self.session_dir(session_id) / f"transcript_{speaker}.txt"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(format_transcript(transcript), encoding="utf-8", newline="\n")

    def load_annotation(self, session_id: str) -> Optional[AnnotationTrack]:
        path = self.session_dir(session_id) / "annotation.txt"
        if not path.exists():
            return None
        return ParserFactory.get_parser("annotation").parse(path)

    def load_transcripts(self, session_id: str) -> Dict[str, Transcript]:
        out = {}
        for speaker in ("m", "f"):
            path = self.session_dir(session_id) / f"transcript_{speaker}.txt"
            if path.exists():
                out[speaker] = ParserFactory.get_parser(f"transcript_{speaker}").parse(path)
        return out

    def load_signals(self, session: RecordingSession, with_audio: bool = True) -> RecordingSession:
        """Return ``session`` with every available series (and the waveform) read from disk."""
        loaded = {}
        for name in SENSOR_SERIES:
            listed = session.series_paths.get(name)
            path = self.root / listed if listed else self.session_dir(session.session_id) / f"{name}.csv"
            if name in session.available and path.exists():
                loaded[name] = ParserFactory.get_parser(name).parse(path)
        audio = session.audio
        if with_audio and audio is not None and audio.path is not None:
            path = self.root / audio.path
            if path.exists():
                rate, waveform = read_wav(path)
                audio = AudioRef(audio.byte_size, audio.duration_s, rate, audio.path, waveform)
            else:
                LOGGER.warning("session %s: audio file %s missing", session.session_id, audio.path)
        return replace(session, audio=audio, **loaded)

    # -- manifests ---------------------------------------------------------
    def write_sessions(self, rows: Iterable[Mapping[str, object]]) -> None:
        frame = pd.DataFrame(list(rows), columns=list(SESSION_COLUMNS))
        frame = frame.sort_values("session_id", kind="mergesort")
        self.root.mkdir(parents=True, exist_ok=True)
        frame.to_csv(self.sessions_csv, index=False, float_format=FLOAT_FORMAT)

    def write_reports(self, reports: Iterable[SelfReport]) -> None:
        rows = [
            {
                "session_id": r.session_id,
                "valence_raw": "" if r.valence_raw is None else f"{r.valence_raw:g}",
                "arousal_raw": "" if r.arousal_raw is None else f"{r.arousal_raw:g}",
                "started_within_first_window": int(r.started_within_first_window),
                "completed": int(r.completed),
            }
            for r in sorted(reports, key=lambda r: r.session_id)
        ]
        pd.DataFrame(rows, columns=list(REPORT_COLUMNS)).to_csv(self.reports_csv, index=False)

    def write_codes(self, codes: Iterable[ContextCode]) -> None:
        rows = []
        for c in sorted(codes, key=lambda c: c.session_id):
            row = {col: getattr(c, col) for col in CODE_COLUMNS}
            for col in CODE_COLUMNS[1:6]:
                row[col] = int(row[col])
            rows.append(row)
        pd.DataFrame(rows, columns=list(CODE_COLUMNS)).to_csv(self.codes_csv, index=False)

    def write_schedules(self, schedules: Iterable[CoupleSchedule]) -> None:
        rows = [
            (s.couple_id, *s.weekday_morning, *s.weekday_evening, *s.weekend)
            for s in sorted(schedules, key=lambda s: s.couple_id)
        ]
        pd.DataFrame(rows, columns=list(SCHEDULE_COLUMNS)).to_csv(self.schedule_csv, index=False)

    def write_ground_truth(self, frame: pd.DataFrame) -> None:
        frame = frame[list(GROUND_TRUTH_COLUMNS)]
        frame.to_csv(self.ground_truth_csv, index=False, float_format="%.4f")

    def _read_manifest(self, path: Path, columns: Tuple[str, ...]) -> pd.DataFrame:
        if not path.exists():
            raise ParseError(f"missing manifest {path.name} in {self.root}")
        try:
            frame = pd.read_csv(path, dtype=str, keep_default_na=False)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
            raise ParseError(f"{path.name}: unreadable ({exc})") from exc
        frame.columns = [str(c).strip() for c in frame.columns]
        missing = [c for c in columns if c not in frame.columns]
        if missing:
            raise ParseError(f"{path.name}: header lacks {missing}")
        return frame

    def load_sessions(self) -> List[RecordingSession]:
        frame = self._read_manifest(self.sessions_csv, REQUIRED_SESSION_COLUMNS)
        sessions = []
        for line_no, row in enumerate(frame.to_dict("records"), start=2):
            try:
                sessions.append(self._session_from_row(row))
            except (ValueError, KeyError, DyadError) as exc:
                raise ParseError(f"sessions.csv:{line_no}: {exc}") from exc
        return sessions

    def _audio_from_row(self, sid: str, row: Mapping[str, str], duration: float) -> AudioRef:
        """Byte size and sample rate come from the file itself; the manifest only fills gaps."""
        rel = Path(row["audio_path"])
        path = self.root / rel
        listed_rate = row.get("sample_rate", "")
        rate = int(float(listed_rate)) if listed_rate else DEFAULT_SAMPLE_RATE
        if not path.exists():
            LOGGER.warning("session %s: audio file %s missing", sid, rel)
            return AudioRef(byte_size=0, duration_s=duration, sample_rate=rate, path=rel)
        size = path.stat().st_size
        try:
            rate = wav_sample_rate(path)
        except ParseError as exc:
            LOGGER.warning("session %s: %s", sid, exc)
        listed_size = row.get("audio_bytes", "")
        if listed_size and int(float(listed_size)) != size:
            LOGGER.warning("session %s: manifest lists %s audio bytes, file has %d", sid, listed_size, size)
        return AudioRef(byte_size=size, duration_s=duration, sample_rate=rate, path=rel)

    def _session_from_row(self, row: Mapping[str, str]) -> RecordingSession:
        sid = row["session_id"]
        window = row.get("window_kind", "")
        slot = HourSlot(date.fromisoformat(row["day"]), int(row["hour"]), WindowKind(window) if window else None)
        partner = PartnerRef(int(row["couple_id"]), Role(row["role"]), Gender(row["gender"]))
        # Nominal length unless listed; a truncated file must not shorten the length it is checked against.
        duration = float(row.get("duration_s", "") or NOMINAL_DURATION_S)
        audio = self._audio_from_row(sid, row, duration) if row["audio_path"] else None
        series_paths = {name: row[f"{name}_path"] for name in SENSOR_SERIES if row.get(f"{name}_path", "")}
        return RecordingSession(
            session_id=sid,
            partner=partner,
            slot=slot,
            start_offset_s=float(row.get("start_offset_s", "") or 0.0),
            duration_s=duration,
            trigger_kind=TriggerKind(row["trigger_kind"]),
            peripheral_delay_s=float(row.get("peripheral_delay_s", "") or 0.0),
            audio=audio,
            available=frozenset(series_paths),
            series_paths=series_paths,
        )

    def load_reports(self) -> List[SelfReport]:
        if not self.reports_csv.exists():
            return []
        frame = self._read_manifest(self.reports_csv, REPORT_COLUMNS)
        out = []
        for line_no, row in enumerate(frame.to_dict("records"), start=2):
            try:
                out.append(
                    SelfReport(
                        row["session_id"],
                        _opt_float(row["valence_raw"]),
                        _opt_float(row["arousal_raw"]),
                        _flag(row["started_within_first_window"]),
                        _flag(row["completed"]),
                    )
                )
            except (ValueError, DyadError) as exc:
                raise ParseError(f"selfreports.csv:{line_no}: {exc}") from exc
        return out

    def load_codes(self) -> List[ContextCode]:
        if not self.codes_csv.exists():
            return []
        frame = self._read_manifest(self.codes_csv, CODE_COLUMNS[:6])
        out = []
        for line_no, row in enumerate(frame.to_dict("records"), start=2):
            try:
                out.append(
                    ContextCode(
                        session_id=row["session_id"],
                        speech_present=_flag(row["speech_present"]),
                        male_spoke=_flag(row["male_spoke"]),
                        female_spoke=_flag(row["female_spoke"]),
                        conversation=_flag(row["conversation"]),
                        partner_conversation=_flag(row["partner_conversation"]),
                        interaction_partner=row.get("interaction_partner", ""),
                        location=row.get("location", ""),
                        activity=row.get("activity", ""),
                        conversation_type=row.get("conversation_type", ""),
                    )
                )
            except DyadError as exc:
                raise ParseError(f"codes.csv:{line_no}: {exc}") from exc
        return out

    def load_schedules(self) -> List[CoupleSchedule]:
        if not self.schedule_csv.exists():
            LOGGER.warning("no schedule.csv in %s; every session will lack its collection window", self.root)
            return []
        frame = self._read_manifest(self.schedule_csv, SCHEDULE_COLUMNS)
        out = []
        for line_no, row in enumerate(frame.to_dict("records"), start=2):
            try:
                v = [int(row[c]) for c in SCHEDULE_COLUMNS]
                out.append(CoupleSchedule(v[0], (v[1], v[2]), (v[3], v[4]), (v[5], v[6])))
            except (ValueError, DyadError) as exc:
                raise ParseError(f"schedule.csv:{line_no}: {exc}") from exc
        return out

    def load_corpus(self) -> Corpus:
        corpus = Corpus(
            root=self.root,
            sessions=self.load_sessions(),
            reports=self.load_reports(),
            codes=self.load_codes(),
            schedules=self.load_schedules(),
        )
        LOGGER.info(
            "loaded corpus %s: %d sessions, %d reports, %d codes",
            self.root,
            len(corpus.sessions),
            len(corpus.reports),
            len(corpus.codes),
        )
        return corpus
