"""Flat key-value YAML configuration for the simulator and the pipeline.

Every key maps onto one field of ``SimConfig`` (or one of its parameter
groups) or of ``PipelineConfig``. Values must be scalars; lists are written
as comma-separated strings and hour windows as ``"6-9"``.
"""

from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

import yaml  # type: ignore

from domain.config_models import (
    BehaviourParams,
    EffectSizes,
    FaultParams,
    NoiseParams,
    PathLossParams,
    PipelineConfig,
    ScheduleConfig,
    SimConfig,
    VadParams,
)
from errors import ConfigError
from logging_config import get_logger

LOGGER = get_logger("config_loader")

REQUIRED_KEYS = ("n_couples", "days", "seed")


def _window(raw: Any) -> Tuple[int, int]:
    lo, hi = str(raw).split("-")
    return int(lo), int(hi)


def _floats(raw: Any) -> Tuple[float, ...]:
    return tuple(float(v) for v in str(raw).split(",") if v.strip())


def _ints(raw: Any) -> Tuple[int, ...]:
    return tuple(int(v) for v in str(raw).split(",") if v.strip())


def _depths(raw: Any) -> Tuple[Optional[int], ...]:
    out = []
    for v in str(raw).split(","):
        v = v.strip().lower()
        if v:
            out.append(None if v in ("none", "inf", "unbounded") else int(v))
    return tuple(out)


def _names(raw: Any) -> Tuple[str, ...]:
    return tuple(v.strip() for v in str(raw).split(",") if v.strip())


def _bool(raw: Any) -> bool:
    if isinstance(raw, bool):
        return raw
    text = str(raw).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _date(raw: Any) -> date:
    return raw if isinstance(raw, date) else date.fromisoformat(str(raw))


# key -> (group, field, converter); group None is a top-level SimConfig field.
_SIM_KEYS: Dict[str, Tuple[Optional[str], str, Callable[[Any], Any]]] = {
    "n_couples": (None, "n_couples", int),
    "days": (None, "days", int),
    "seed": (None, "seed", int),
    "start_date": (None, "start_date", _date),
    "rssi_threshold_dbm": (None, "rssi_threshold_dbm", float),
    "compliance": (None, "compliance", float),
    "session_duration_s": (None, "session_duration_s", float),
    "audio_sample_rate": (None, "audio_sample_rate", int),
    "hr_rate_hz": (None, "hr_rate_hz", float),
    "imu_rate_hz": (None, "imu_rate_hz", float),
    "write_audio": (None, "write_audio", _bool),
    "path_loss_rssi_at_1m_dbm": ("path_loss", "rssi_at_1m_dbm", float),
    "path_loss_exponent": ("path_loss", "exponent", float),
    "path_loss_noise_sd_db": ("path_loss", "noise_sd_db", float),
    "vad_sample_rate": ("vad", "sample_rate", int),
    "vad_snippet_s": ("vad", "snippet_s", float),
    "vad_frame_ms": ("vad", "frame_ms", float),
    "vad_hop_ms": ("vad", "hop_ms", float),
    "vad_noise_window_ms": ("vad", "noise_window_ms", float),
    "vad_threshold_ratio": ("vad", "threshold_ratio", float),
    "vad_min_speech_ms": ("vad", "min_speech_ms", float),
    "effect_base_bpm": ("effects", "base_bpm", float),
    "effect_alpha_hr": ("effects", "alpha_hr", float),
    "effect_beta_mv": ("effects", "beta_mv", float),
    "effect_gamma_f0": ("effects", "gamma_f0", float),
    "effect_gamma_en": ("effects", "gamma_en", float),
    "effect_valence_tilt": ("effects", "valence_tilt", float),
    "effect_lexicon_positive_max": ("effects", "lexicon_positive_max", float),
    "noise_hr_sd": ("noise", "hr_sd", float),
    "noise_activity_sd": ("noise", "activity_sd", float),
    "noise_gyro_per_accel": ("noise", "gyro_per_accel", float),
    "noise_audio_floor": ("noise", "audio_floor", float),
    "noise_report_sd": ("noise", "report_sd", float),
    "noise_timestamp_jitter": ("noise", "timestamp_jitter", float),
    "noise_hr_artifact_rate": ("noise", "hr_artifact_rate", float),
    "fault_corrupt_audio_rate": ("faults", "corrupt_audio_rate", float),
    "fault_outside_window_rate": ("faults", "outside_window_rate", float),
    "fault_non_worn_rate": ("faults", "non_worn_rate", float),
    "schedule_weekday_morning": ("schedule", "weekday_morning", _window),
    "schedule_weekday_evening": ("schedule", "weekday_evening", _window),
    "schedule_weekend": ("schedule", "weekend", _window),
    "schedule_jitter_hours": ("schedule", "jitter_hours", int),
    "behaviour_together_prob": ("behaviour", "together_prob", float),
    "behaviour_talk_prob": ("behaviour", "talk_prob", float),
    "behaviour_latent_step_sd": ("behaviour", "latent_step_sd", float),
    "behaviour_latent_drift": ("behaviour", "latent_drift", float),
    "behaviour_latent_spike_prob": ("behaviour", "latent_spike_prob", float),
    "behaviour_latent_spike_sd": ("behaviour", "latent_spike_sd", float),
    "behaviour_valence_center": ("behaviour", "valence_center", float),
    "behaviour_arousal_center": ("behaviour", "arousal_center", float),
    "behaviour_center_spread": ("behaviour", "center_spread", float),
    "behaviour_first_window_start_prob": ("behaviour", "first_window_start_prob", float),
    "behaviour_xy_rate": ("behaviour", "xy_rate", float),
    "behaviour_filler_rate": ("behaviour", "filler_rate", float),
}

_PIPELINE_KEYS: Dict[str, Tuple[str, Callable[[Any], Any]]] = {
    "folds": ("folds", int),
    "inner_folds": ("inner_folds", int),
    "models": ("models", _names),
    "grid_svm_c": ("grid_svm_c", _floats),
    "grid_rf_n_trees": ("grid_rf_n_trees", _ints),
    "grid_rf_max_depth": ("grid_rf_max_depth", _depths),
    "grid_rbf_gamma": ("grid_rbf_gamma", _floats),
    "rf_min_leaf": ("rf_min_leaf", int),
    "svm_epochs": ("svm_epochs", int),
    "acoustic": ("acoustic", str),
    "linguistic": ("linguistic", str),
    "linguistic_scope": ("linguistic_scope", str),
    "lowpass_cutoff_hz": ("lowpass_cutoff_hz", float),
}

_GROUPS = {
    "path_loss": PathLossParams,
    "vad": VadParams,
    "effects": EffectSizes,
    "noise": NoiseParams,
    "faults": FaultParams,
    "schedule": ScheduleConfig,
    "behaviour": BehaviourParams,
}

KNOWN_KEYS = frozenset(_SIM_KEYS) | frozenset(_PIPELINE_KEYS)


@dataclass(frozen=True)
class LoadedConfig:
    sim: SimConfig
    pipeline: PipelineConfig
    source: Optional[Path] = None


def read_flat_yaml(text: str, source: str = "<config>") -> Dict[str, Tuple[Any, int]]:
    """Parse a flat mapping into key -> (value, 1-based line)."""
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else 0
        raise ConfigError(f"{source}: invalid YAML ({exc})", line=line) from exc
    if root is None:
        return {}
    if not isinstance(root, yaml.MappingNode):
        raise ConfigError(f"{source}: top level must be a key-value mapping", line=root.start_mark.line + 1)
    constructor = yaml.SafeLoader("")
    out: Dict[str, Tuple[Any, int]] = {}
    for key_node, value_node in root.value:
        line = key_node.start_mark.line + 1
        key = str(key_node.value)
        if not isinstance(value_node, yaml.ScalarNode):
            raise ConfigError(f"{source}:{line}: key {key!r} must have a scalar value", key=key, line=line)
        if key in out:
            raise ConfigError(f"{source}:{line}: duplicate key {key!r}", key=key, line=line)
        out[key] = (constructor.construct_object(value_node, deep=True), line)
    constructor.dispose()
    return out


def build_config(values: Dict[str, Tuple[Any, int]], source: str = "<config>", seed_override: Optional[int] = None) -> LoadedConfig:
    for key in REQUIRED_KEYS:
        if key not in values and not (key == "seed" and seed_override is not None):
            raise ConfigError(f"{source}: missing required key {key!r}", key=key)
    top: Dict[str, Any] = {}
    groups: Dict[str, Dict[str, Any]] = {name: {} for name in _GROUPS}
    pipeline: Dict[str, Any] = {}
    for key, (raw, line) in values.items():
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{line}: unknown key {key!r}", key=key, line=line)
        try:
            if key in _SIM_KEYS:
                group, name, convert = _SIM_KEYS[key]
                (top if group is None else groups[group])[name] = convert(raw)
            else:
                name, convert = _PIPELINE_KEYS[key]
                pipeline[name] = convert(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{source}:{line}: bad value for {key!r} ({exc})", key=key, line=line) from exc

    if seed_override is not None:
        top["seed"] = seed_override
    lines = {key: line for key, (_, line) in values.items()}
    try:
        built = {name: cls(**groups[name]) for name, cls in _GROUPS.items()}
        sim = SimConfig(**top, **built)
        pipeline_config = PipelineConfig(seed=sim.seed, **pipeline)
    except ConfigError as exc:
        raise ConfigError(str(exc), key=exc.key, line=lines.get(exc.key, exc.line)) from exc
    return LoadedConfig(sim, pipeline_config)


def load_config(path: Path, seed_override: Optional[int] = None) -> LoadedConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}", key="config")
    values = read_flat_yaml(path.read_text(encoding="utf-8"), source=path.name)
    loaded = build_config(values, source=path.name, seed_override=seed_override)
    LOGGER.info("loaded %d keys from %s (seed=%d)", len(values), path, loaded.sim.seed)
    return LoadedConfig(loaded.sim, loaded.pipeline, path)
