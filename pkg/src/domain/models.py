from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, Optional, Tuple

import numpy as np

from errors import DomainError, ValidationError


class Role(str, Enum):
    PATIENT = "patient"
    SUPPORT_PARTNER = "support_partner"


class Gender(str, Enum):
    MALE = "male"
    FEMALE = "female"

    @property
    def speaker(self) -> str:
        return "m" if self is Gender.MALE else "f"


class WindowKind(str, Enum):
    WEEKDAY_MORNING = "weekday_morning"
    WEEKDAY_EVENING = "weekday_evening"
    WEEKEND = "weekend"


class TriggerKind(str, Enum):
    INTERACTION = "interaction"
    BACKUP = "backup"


class ValenceBin(str, Enum):
    NEGATIVE = "negative"
    POSITIVE = "positive"


class ArousalBin(str, Enum):
    LOW = "low"
    HIGH = "high"


class Quadrant(str, Enum):
    Q1_HIGH_POS = "Q1_high_pos"
    Q2_HIGH_NEG = "Q2_high_neg"
    Q3_LOW_NEG = "Q3_low_neg"
    Q4_LOW_POS = "Q4_low_pos"


class Modality(str, Enum):
    PHYSIO = "physio"
    MOVEMENT = "movement"
    ACOUSTIC = "acoustic"
    LINGUISTIC = "linguistic"
    FUSED = "fused"


# Canonical concatenation order for feature-level fusion.
MODALITY_ORDER: Tuple[Modality, ...] = (
    Modality.PHYSIO,
    Modality.MOVEMENT,
    Modality.ACOUSTIC,
    Modality.LINGUISTIC,
)

SENSOR_SERIES = ("hr", "accel", "gyro", "light", "wear")
NOMINAL_DURATION_S = 300.0

# Windows allowed by the study design, as [start_hour, end_hour).
MORNING_BOUNDS = (4, 11)
EVENING_BOUNDS = (16, 23)


@dataclass(frozen=True)
class PartnerRef:
    couple_id: int
    role: Role
    gender: Gender

    def __post_init__(self):
        if self.couple_id < 1:
            raise DomainError(f"couple_id must be >= 1, got {self.couple_id}")

    @property
    def watch(self) -> str:
        return "central" if self.role is Role.PATIENT else "peripheral"


@dataclass(frozen=True)
class HourSlot:
    day: date
    hour: int
    # None when the hour lies outside every declared window or the manifest omits it.
    window_kind: Optional[WindowKind]

    def __post_init__(self):
        if not 0 <= self.hour <= 23:
            raise DomainError(f"hour must be in 0..23, got {self.hour}")
        if self.window_kind is WindowKind.WEEKDAY_MORNING and not MORNING_BOUNDS[0] <= self.hour < MORNING_BOUNDS[1]:
            raise DomainError(f"weekday_morning slot at hour {self.hour}")
        if self.window_kind is WindowKind.WEEKDAY_EVENING and not EVENING_BOUNDS[0] <= self.hour < EVENING_BOUNDS[1]:
            raise DomainError(f"weekday_evening slot at hour {self.hour}")


@dataclass(frozen=True)
class CoupleSchedule:
    """Collection hours a couple declared, each as [start_hour, end_hour)."""

    couple_id: int
    weekday_morning: Tuple[int, int]
    weekday_evening: Tuple[int, int]
    weekend: Tuple[int, int]

    def __post_init__(self):
        for name, (lo, hi), bounds in (
            ("weekday_morning", self.weekday_morning, MORNING_BOUNDS),
            ("weekday_evening", self.weekday_evening, EVENING_BOUNDS),
        ):
            if not (bounds[0] <= lo and hi <= bounds[1] and hi - lo >= 2):
                raise DomainError(f"{name} window {lo}-{hi} outside {bounds} or shorter than 2 h")
        lo, hi = self.weekend
        if not 0 <= lo < hi <= 24:
            raise DomainError(f"weekend window {lo}-{hi} invalid")

    def window_for(self, day: date, hour: int) -> Optional[WindowKind]:
        if day.weekday() >= 5:
            lo, hi = self.weekend
            return WindowKind.WEEKEND if lo <= hour < hi else None
        if self.weekday_morning[0] <= hour < self.weekday_morning[1]:
            return WindowKind.WEEKDAY_MORNING
        if self.weekday_evening[0] <= hour < self.weekday_evening[1]:
            return WindowKind.WEEKDAY_EVENING
        return None

    def hours_for(self, day: date) -> Tuple[int, ...]:
        return tuple(h for h in range(24) if self.window_for(day, h) is not None)

    def contains(self, slot: HourSlot) -> bool:
        return self.window_for(slot.day, slot.hour) is not None


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Timestamps in seconds from session start plus one row of values per timestamp."""

    t: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.t) != len(self.values):
            raise ValidationError(f"timestamps ({len(self.t)}) and values ({len(self.values)}) differ in length")

    def __len__(self) -> int:
        return len(self.t)

    @property
    def is_empty(self) -> bool:
        return len(self.t) == 0


@dataclass(frozen=True, eq=False)
class AudioRef:
    """Mono PCM recording; the waveform is loaded lazily from ``path``."""

    byte_size: int
    duration_s: float
    sample_rate: int = 44100
    path: Optional[Path] = None
    waveform: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class RecordingSession:
    session_id: str
    partner: PartnerRef
    slot: HourSlot
    start_offset_s: float
    duration_s: float
    trigger_kind: TriggerKind
    peripheral_delay_s: float = 0.0
    audio: Optional[AudioRef] = None
    hr: Optional[TimeSeries] = None
    accel: Optional[TimeSeries] = None
    gyro: Optional[TimeSeries] = None
    light: Optional[TimeSeries] = None
    wear: Optional[TimeSeries] = None
    # Series known to exist on disk when the signals themselves are not loaded.
    available: FrozenSet[str] = frozenset()
    # Root-relative CSV path per series, as listed in the manifest.
    series_paths: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.duration_s > NOMINAL_DURATION_S:
            raise DomainError(f"{self.session_id}: duration {self.duration_s}s exceeds {NOMINAL_DURATION_S:g}s")
        if not 0 <= self.peripheral_delay_s <= 10:
            raise DomainError(f"{self.session_id}: peripheral delay {self.peripheral_delay_s}s outside [0, 10]")
        if self.wear is not None and len(self.wear) and not np.isin(self.wear.values, (0, 1, 2, 3)).all():
            raise DomainError(f"{self.session_id}: wear confidence outside 0..3")

    def has_series(self, name: str) -> bool:
        series = getattr(self, name)
        if series is not None:
            return not series.is_empty
        return name in self.available

    @property
    def has_all_sensors(self) -> bool:
        return all(self.has_series(name) for name in SENSOR_SERIES)


@dataclass(frozen=True)
class SelfReport:
    session_id: str
    valence_raw: Optional[float]
    arousal_raw: Optional[float]
    started_within_first_window: bool
    completed: bool

    def __post_init__(self):
        for name in ("valence_raw", "arousal_raw"):
            value = getattr(self, name)
            if value is not None and not 0 <= value <= 100:
                raise DomainError(f"{self.session_id}: {name}={value} outside [0, 100]")
        if self.completed and (self.valence_raw is None or self.arousal_raw is None):
            raise DomainError(f"{self.session_id}: completed report missing a raw value")


@dataclass(frozen=True)
class EmotionLabel:
    valence_bin: ValenceBin
    arousal_bin: ArousalBin
    quadrant: Quadrant

    def binary(self, target: str) -> int:
        """1 for positive valence / high arousal, 0 otherwise."""
        if target == "valence":
            return int(self.valence_bin is ValenceBin.POSITIVE)
        if target == "arousal":
            return int(self.arousal_bin is ArousalBin.HIGH)
        raise DomainError(f"unknown target {target!r}")


@dataclass(frozen=True)
class ContextCode:
    session_id: str
    speech_present: bool
    male_spoke: bool
    female_spoke: bool
    conversation: bool
    partner_conversation: bool
    interaction_partner: str = ""
    location: str = ""
    activity: str = ""
    conversation_type: str = ""

    def __post_init__(self):
        if self.partner_conversation and not (self.male_spoke and self.female_spoke):
            raise DomainError(f"{self.session_id}: partner_conversation without both partners speaking")


@dataclass(frozen=True, eq=False)
class FeatureVector:
    modality: Modality
    values: np.ndarray
    flags: Tuple[str, ...] = ()
    # (modality, start, end) column spans, only set on fused vectors.
    spans: Tuple[Tuple[Modality, int, int], ...] = ()

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    @property
    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())


@dataclass(frozen=True, eq=False)
class DatasetSample:
    session_id: str
    couple_id: int
    gender: Gender
    label: EmotionLabel
    features: Dict[Modality, FeatureVector] = field(default_factory=dict)

    def __post_init__(self):
        if self.label is None:
            raise ValidationError(f"{self.session_id}: sample without label")
        for modality, vector in self.features.items():
            if not vector.is_finite:
                raise ValidationError(f"{self.session_id}: non-finite {modality.value} features")
