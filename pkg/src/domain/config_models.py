from dataclasses import dataclass, field
from datetime import date
from typing import Any, Dict, Optional, Tuple

from errors import ConfigError


@dataclass(frozen=True)
class PathLossParams:
    rssi_at_1m_dbm: float = -59.0
    exponent: float = 2.0
    noise_sd_db: float = 2.0

    def __post_init__(self):
        if not 1.5 <= self.exponent <= 4.0:
            raise ConfigError(f"path loss exponent must be in [1.5, 4], got {self.exponent}", key="path_loss_exponent")
        if self.noise_sd_db < 0:
            raise ConfigError("path loss noise must be >= 0", key="path_loss_noise_sd_db")


@dataclass(frozen=True)
class VadParams:
    sample_rate: int = 8000
    snippet_s: float = 2.0
    frame_ms: float = 25.0
    hop_ms: float = 10.0
    noise_window_ms: float = 500.0
    threshold_ratio: float = 6.0
    min_speech_ms: float = 500.0

    def __post_init__(self):
        if self.threshold_ratio <= 1.0:
            raise ConfigError("vad_threshold_ratio must be > 1", key="vad_threshold_ratio")
        if self.min_speech_ms <= 0 or self.frame_ms <= 0 or self.hop_ms <= 0:
            raise ConfigError("vad timings must be positive", key="vad_min_speech_ms")


@dataclass(frozen=True)
class EffectSizes:
    """Planted links from latent emotion to signals, all scaled by latent/100."""

    base_bpm: float = 72.0
    alpha_hr: float = 15.0
    beta_mv: float = 1.5
    gamma_f0: float = 40.0
    gamma_en: float = 0.8
    valence_tilt: float = 0.0
    lexicon_positive_max: float = 0.8


@dataclass(frozen=True)
class NoiseParams:
    hr_sd: float = 3.0
    activity_sd: float = 0.3
    gyro_per_accel: float = 0.15
    audio_floor: float = 0.002
    report_sd: float = 5.0
    timestamp_jitter: float = 0.1
    hr_artifact_rate: float = 0.01


@dataclass(frozen=True)
class FaultParams:
    corrupt_audio_rate: float = 0.0
    outside_window_rate: float = 0.0
    non_worn_rate: float = 0.0


@dataclass(frozen=True)
class ScheduleConfig:
    weekday_morning: Tuple[int, int] = (6, 9)
    weekday_evening: Tuple[int, int] = (17, 21)
    weekend: Tuple[int, int] = (8, 20)
    # Extra hours each couple may randomly shift its windows by.
    jitter_hours: int = 0


@dataclass(frozen=True)
class BehaviourParams:
    together_prob: float = 0.6
    talk_prob: float = 0.5
    latent_step_sd: float = 2.0
    latent_drift: float = 0.05
    latent_spike_prob: float = 0.01
    latent_spike_sd: float = 20.0
    valence_center: float = 70.0
    arousal_center: float = 60.0
    center_spread: float = 10.0
    first_window_start_prob: float = 0.8
    xy_rate: float = 0.03
    filler_rate: float = 0.3


@dataclass(frozen=True)
class SimConfig:
    n_couples: int
    days: int = 7
    seed: int = 0
    start_date: date = date(2021, 3, 1)
    rssi_threshold_dbm: float = -70.0
    path_loss: PathLossParams = field(default_factory=PathLossParams)
    vad: VadParams = field(default_factory=VadParams)
    compliance: float = 0.6
    effects: EffectSizes = field(default_factory=EffectSizes)
    noise: NoiseParams = field(default_factory=NoiseParams)
    faults: FaultParams = field(default_factory=FaultParams)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    behaviour: BehaviourParams = field(default_factory=BehaviourParams)
    session_duration_s: float = 300.0
    audio_sample_rate: int = 44100
    hr_rate_hz: float = 1.0
    imu_rate_hz: float = 50.0
    write_audio: bool = True
    overrides: Dict[int, ScheduleConfig] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_couples < 1:
            raise ConfigError("n_couples must be >= 1", key="n_couples")
        if self.days < 1:
            raise ConfigError("days must be >= 1", key="days")
        if self.rssi_threshold_dbm >= 0:
            raise ConfigError("rssi_threshold_dbm must be negative", key="rssi_threshold_dbm")
        if not 0.0 <= self.compliance <= 1.0:
            raise ConfigError("compliance must be in [0, 1]", key="compliance")
        if not 0 < self.session_duration_s <= 300:
            raise ConfigError("session_duration_s must be in (0, 300]", key="session_duration_s")
        if self.audio_sample_rate < 8000:
            raise ConfigError("audio_sample_rate must be >= 8000", key="audio_sample_rate")

    def schedule_for(self, couple_id: int) -> ScheduleConfig:
        return self.overrides.get(couple_id, self.schedule)


MODEL_KINDS = ("linear_svm", "random_forest", "rbf_svm")


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    hyperparams: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    # label (0/1) -> weight; empty means unweighted
    class_weights: Dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}", key="models")
        if "C" in self.hyperparams and not self.hyperparams["C"] > 0:
            raise ConfigError(f"C must be > 0, got {self.hyperparams['C']}", key="grid_svm_c")
        if "n_trees" in self.hyperparams and int(self.hyperparams["n_trees"]) < 1:
            raise ConfigError("n_trees must be >= 1", key="grid_rf_n_trees")
        if any(w <= 0 for w in self.class_weights.values()):
            raise ConfigError("class weights must be positive", key="class_weights")


@dataclass(frozen=True)
class PipelineConfig:
    folds: int = 3
    inner_folds: int = 2
    models: Tuple[str, ...] = ("linear_svm", "random_forest")
    grid_svm_c: Tuple[float, ...] = (0.01, 0.1, 1.0, 10.0)
    grid_rf_n_trees: Tuple[int, ...] = (100, 300)
    # None is an unbounded depth
    grid_rf_max_depth: Tuple[Optional[int], ...] = (None, 10)
    grid_rbf_gamma: Tuple[float, ...] = (0.01, 0.1)
    rf_min_leaf: int = 1
    svm_epochs: int = 300
    acoustic: str = "lite"
    linguistic: str = "hash:256"
    linguistic_scope: str = "partner"
    lowpass_cutoff_hz: float = 4000.0
    seed: int = 0

    def __post_init__(self):
        if self.folds < 2:
            raise ConfigError("folds must be >= 2", key="folds")
        if self.inner_folds < 2:
            raise ConfigError("inner_folds must be >= 2", key="inner_folds")
        for kind in self.models:
            if kind not in MODEL_KINDS:
                raise ConfigError(f"unknown model kind {kind!r}", key="models")
        if not (self.acoustic == "lite" or self.acoustic.startswith("ingest:")):
            raise ConfigError(f"acoustic must be 'lite' or 'ingest:<file>', got {self.acoustic!r}", key="acoustic")
        if not (self.linguistic.startswith("hash:") or self.linguistic.startswith("ingest:")):
            raise ConfigError(
                f"linguistic must be 'hash:<dim>' or 'ingest:<file>', got {self.linguistic!r}", key="linguistic"
            )
        if self.linguistic_scope not in ("partner", "session"):
            raise ConfigError("linguistic_scope must be 'partner' or 'session'", key="linguistic_scope")
