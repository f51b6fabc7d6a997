"""Signal conditioning and validity checks applied to every 5-minute session."""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import signal

from domain.models import RecordingSession, TimeSeries
from errors import DomainError, ValidationError
from features.stats import magnitude
from logging_config import get_logger

LOGGER = get_logger("preprocessing")

AUDIO_RATE_HZ = 44100
LOWPASS_CUTOFF_HZ = 4000.0
LOWPASS_TAPS = 101
HR_RATE_HZ = 1.0
IMU_RATE_HZ = 50.0
HR_MIN_BPM = 30.0
HR_MAX_BPM = 200.0
OUTLIER_SD = 2.0
WAV_HEADER_BYTES = 44
CORRUPT_SIZE_RATIO = 0.95


@dataclass(frozen=True, eq=False)
class FilterResult:
    values: np.ndarray
    keep: np.ndarray
    warnings: Tuple[str, ...] = ()


def lowpass_audio(
    waveform: np.ndarray,
    cutoff_hz: float = LOWPASS_CUTOFF_HZ,
    sample_rate: int = AUDIO_RATE_HZ,
    numtaps: int = LOWPASS_TAPS,
) -> np.ndarray:
    """Linear-phase windowed-sinc (Hamming) low-pass; output has the input's length."""
    if cutoff_hz <= 0:
        raise DomainError(f"cutoff must be positive, got {cutoff_hz}")
    x = np.asarray(waveform, dtype=np.float64)
    # Nothing above Nyquist to remove.
    if x.size == 0 or cutoff_hz >= sample_rate / 2:
        return x.copy()
    taps = signal.firwin(numtaps, cutoff_hz, window="hamming", fs=sample_rate)
    half = numtaps // 2
    padded = np.pad(x, half, mode="edge")
    return np.convolve(padded, taps, mode="valid")


def remove_outliers(values: np.ndarray, n_sd: float = OUTLIER_SD) -> FilterResult:
    """Drop points more than ``n_sd`` population standard deviations from the mean."""
    x = np.asarray(values, dtype=np.float64)
    if x.shape[0] < 2:
        return FilterResult(x.copy(), np.ones(x.shape[0], dtype=bool), ("too_short",))
    mean = x.mean()
    sd = x.std()
    if sd == 0.0:
        return FilterResult(x.copy(), np.ones(x.shape[0], dtype=bool))
    keep = np.abs(x - mean) <= n_sd * sd
    return FilterResult(x[keep], keep)


def resample(t: np.ndarray, values: np.ndarray, target_hz: float) -> Tuple[np.ndarray, np.ndarray]:
    """Linear interpolation onto a uniform grid from the first to the last timestamp."""
    t = np.asarray(t, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if t.shape[0] < 2:
        raise ValidationError("resample needs at least 2 points")
    if np.any(np.diff(t) <= 0):
        raise ValidationError("resample needs strictly increasing timestamps")
    if target_hz <= 0:
        raise DomainError(f"target rate must be positive, got {target_hz}")
    n = int(np.floor((t[-1] - t[0]) * target_hz + 1e-9)) + 1
    grid = t[0] + np.arange(n) / target_hz
    if v.ndim == 1:
        return grid, np.interp(grid, t, v)
    return grid, np.column_stack([np.interp(grid, t, v[:, j]) for j in range(v.shape[1])])


def filter_hr_range(values: np.ndarray, low: float = HR_MIN_BPM, high: float = HR_MAX_BPM) -> FilterResult:
    x = np.asarray(values, dtype=np.float64)
    keep = (x >= low) & (x <= high)
    return FilterResult(x[keep], keep)


def infer_wear_state(wear_values: np.ndarray) -> str:
    w = np.asarray(wear_values)
    if w.size == 0:
        return "non_worn"
    return "non_worn" if np.mean(w == 0) >= 0.5 else "worn"


def expected_audio_bytes(
    duration_s: float,
    sample_rate: int = AUDIO_RATE_HZ,
    bytes_per_sample: int = 2,
    channels: int = 1,
) -> int:
    return int(round(duration_s * sample_rate)) * bytes_per_sample * channels + WAV_HEADER_BYTES


def detect_corrupt_audio(
    byte_size: int,
    duration_s: float,
    sample_rate: int = AUDIO_RATE_HZ,
    bytes_per_sample: int = 2,
    channels: int = 1,
) -> str:
    expected = expected_audio_bytes(duration_s, sample_rate, bytes_per_sample, channels)
    return "corrupt" if byte_size < CORRUPT_SIZE_RATIO * expected else "ok"


@dataclass(frozen=True)
class CheckOutcome:
    session_id: str
    check: str
    outcome: str


@dataclass(frozen=True, eq=False)
class PreprocessedSession:
    session_id: str
    hr: TimeSeries
    accel_magnitude: TimeSeries
    gyro_magnitude: TimeSeries
    audio: Optional[np.ndarray]
    audio_rate: int
    wear_state: str
    outcomes: List[CheckOutcome] = field(default_factory=list)


def _condition_scalar(
    name: str,
    session_id: str,
    t: np.ndarray,
    values: np.ndarray,
    rate_hz: float,
    outcomes: List[CheckOutcome],
) -> TimeSeries:
    filtered = remove_outliers(values)
    t_kept = t[filtered.keep]
    outcomes.append(CheckOutcome(session_id, f"{name}_outliers", f"removed={int((~filtered.keep).sum())}"))
    if filtered.warnings:
        outcomes.append(CheckOutcome(session_id, f"{name}_outliers", ",".join(filtered.warnings)))
    if t_kept.shape[0] < 2:
        outcomes.append(CheckOutcome(session_id, f"{name}_resample", "insufficient_points"))
        return TimeSeries(t_kept, filtered.values)
    grid, grid_values = resample(t_kept, filtered.values, rate_hz)
    return TimeSeries(grid, grid_values)


def preprocess_session(
    session: RecordingSession,
    hr_rate_hz: float = HR_RATE_HZ,
    imu_rate_hz: float = IMU_RATE_HZ,
    lowpass_cutoff_hz: float = LOWPASS_CUTOFF_HZ,
) -> PreprocessedSession:
    """HR: range filter, outliers, 1 Hz. IMU: magnitude, outliers, 50 Hz. Audio: 4 kHz low-pass."""
    sid = session.session_id
    outcomes: List[CheckOutcome] = []

    hr_range = filter_hr_range(session.hr.values)
    outcomes.append(CheckOutcome(sid, "hr_range", f"removed={int((~hr_range.keep).sum())}"))
    hr = _condition_scalar("hr", sid, session.hr.t[hr_range.keep], hr_range.values, hr_rate_hz, outcomes)

    accel = _condition_scalar("accel", sid, session.accel.t, magnitude(session.accel.values), imu_rate_hz, outcomes)
    gyro = _condition_scalar("gyro", sid, session.gyro.t, magnitude(session.gyro.values), imu_rate_hz, outcomes)

    wear_state = infer_wear_state(session.wear.values)
    outcomes.append(CheckOutcome(sid, "wear_state", wear_state))

    audio = None
    audio_rate = AUDIO_RATE_HZ
    if session.audio is not None:
        audio_rate = session.audio.sample_rate
        status = detect_corrupt_audio(session.audio.byte_size, session.duration_s, audio_rate)
        outcomes.append(CheckOutcome(sid, "audio_size", status))
        if session.audio.waveform is not None:
            audio = lowpass_audio(session.audio.waveform, lowpass_cutoff_hz, audio_rate)
            outcomes.append(CheckOutcome(sid, "audio_lowpass", f"cutoff={lowpass_cutoff_hz:g}"))

    if wear_state == "non_worn":
        LOGGER.warning("session %s inferred as non-worn", sid)
    return PreprocessedSession(sid, hr, accel, gyro, audio, audio_rate, wear_state, outcomes)
