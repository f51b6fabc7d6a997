"""Synthetic watch signals with planted links to the wearer's latent emotion.

Heart rate shifts with arousal, movement variance grows with arousal, voice
pitch and energy rise with arousal, spectral tilt follows valence and the
transcript's positive-word share follows valence. Every effect size comes from
``EffectSizes`` and every link is scaled by latent/100.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from domain.config_models import EffectSizes, NoiseParams, SimConfig
from domain.models import Gender, TimeSeries
from errors import DomainError
from qa.annotation import AnnotationTrack
from qa.transcript import CHUNK_S, Transcript
from simulation.lexicon import draw_tokens
from simulation.voice import speak

GRAVITY = 9.81
BASE_F0_HZ = {"m": 120.0, "f": 210.0, "u": 160.0}
BASE_AMPLITUDE = 0.05
PARTNER_ATTENUATION = 0.6
OTHER_ATTENUATION = 0.4
WORDS_PER_S = 2.0
LIGHT_RATE_HZ = 1.0
WEAR_RATE_HZ = 1.0


@dataclass(frozen=True)
class SensorInputs:
    """Everything one watch's signals depend on for one session."""

    wearer: Gender
    duration_s: float
    # speaker ('m'/'f') -> (valence, arousal) latent means over the session
    latent: Dict[str, Tuple[float, float]]
    activity: float = 0.3
    annotation: AnnotationTrack = field(default_factory=AnnotationTrack)
    non_worn: bool = False

    def __post_init__(self):
        for speaker, (v, a) in self.latent.items():
            if not (0 <= v <= 100 and 0 <= a <= 100):
                raise DomainError(f"latent for {speaker} outside [0, 100]: ({v}, {a})")


@dataclass(frozen=True, eq=False)
class SessionSignals:
    hr: TimeSeries
    accel: TimeSeries
    gyro: TimeSeries
    light: TimeSeries
    wear: TimeSeries
    waveform: Optional[np.ndarray]
    sample_rate: int
    transcripts: Dict[str, Transcript]


def _timestamps(duration_s: float, rate_hz: float, jitter: float, rng: np.random.Generator) -> np.ndarray:
    """Irregular sampling around ``rate_hz``; jitter is a fraction of the nominal period."""
    period = 1.0 / rate_hz
    n = int(np.ceil(duration_s * rate_hz)) + 2
    steps = period * (1.0 + rng.uniform(-jitter, jitter, n)) if jitter > 0 else np.full(n, period)
    t = rng.uniform(0.0, period * 0.5) + np.concatenate([[0.0], np.cumsum(steps[:-1])])
    return t[t < duration_s]


def synth_hr(arousal: float, duration_s: float, effects: EffectSizes, noise: NoiseParams, rate_hz: float, rng) -> TimeSeries:
    t = _timestamps(duration_s, rate_hz, noise.timestamp_jitter, rng)
    values = effects.base_bpm + effects.alpha_hr * arousal / 100.0 + rng.normal(0.0, 1.0, t.shape[0]) * noise.hr_sd
    if noise.hr_artifact_rate > 0:
        artifacts = rng.random(t.shape[0]) < noise.hr_artifact_rate
        values = np.where(artifacts, rng.choice([15.0, 240.0], t.shape[0]), values)
    return TimeSeries(t, values)


def _random_unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def synth_imu(
    arousal: float,
    activity: float,
    duration_s: float,
    effects: EffectSizes,
    noise: NoiseParams,
    rate_hz: float,
    rng: np.random.Generator,
) -> Tuple[TimeSeries, TimeSeries]:
    """Gravity along a random wrist orientation plus isotropic motion noise."""
    t = _timestamps(duration_s, rate_hz, noise.timestamp_jitter, rng)
    sd = effects.beta_mv * arousal / 100.0 + noise.activity_sd * activity
    gravity = GRAVITY * _random_unit(rng)
    accel = gravity[None, :] + rng.normal(0.0, 1.0, (t.shape[0], 3)) * sd
    gyro = rng.normal(0.0, 1.0, (t.shape[0], 3)) * sd * noise.gyro_per_accel
    return TimeSeries(t, accel), TimeSeries(t.copy(), gyro)


def synth_light(activity: float, duration_s: float, rng: np.random.Generator) -> TimeSeries:
    t = np.arange(0.0, duration_s, 1.0 / LIGHT_RATE_HZ)
    lux = np.clip(150.0 + 300.0 * activity + rng.normal(0.0, 20.0, t.shape[0]), 0.0, None)
    return TimeSeries(t, lux)


def synth_wear(duration_s: float, non_worn: bool, rng: np.random.Generator) -> TimeSeries:
    t = np.arange(0.0, duration_s, 1.0 / WEAR_RATE_HZ)
    if non_worn:
        values = np.where(rng.random(t.shape[0]) < 0.8, 0, 1)
    else:
        values = np.where(rng.random(t.shape[0]) < 0.95, 3, 2)
    return TimeSeries(t, values.astype(np.int64))


def synth_audio(inputs: SensorInputs, effects: EffectSizes, noise: NoiseParams, sample_rate: int, rng) -> np.ndarray:
    n = int(round(inputs.duration_s * sample_rate))
    x = rng.normal(0.0, noise.audio_floor, n)
    wearer = inputs.wearer.speaker
    for seg in inputs.annotation.segments:
        if seg.label in ("m", "f"):
            valence, arousal = inputs.latent.get(seg.label, (50.0, 50.0))
            f0 = BASE_F0_HZ[seg.label] + effects.gamma_f0 * arousal / 100.0
            amplitude = BASE_AMPLITUDE * (1.0 + effects.gamma_en * arousal / 100.0)
            if seg.label != wearer:
                amplitude *= PARTNER_ATTENUATION
            tilt = float(np.clip(1.2 - effects.valence_tilt * (valence / 100.0 - 0.5), 0.3, 3.0))
        elif seg.label == "u":
            f0, amplitude, tilt = BASE_F0_HZ["u"], BASE_AMPLITUDE * OTHER_ATTENUATION, 1.2
        else:
            continue
        speak(x, seg.start, seg.end - seg.start, sample_rate, f0, amplitude, tilt, rng)
    return np.clip(x, -1.0, 1.0)


def synth_transcripts(inputs: SensorInputs, effects: EffectSizes, filler_rate: float, xy_rate: float, rng) -> Dict[str, Transcript]:
    """One transcript per partner; chunk i holds words spoken in [15i, 15(i+1))."""
    n_chunks = int(np.ceil(inputs.duration_s / CHUNK_S))
    out = {}
    for speaker in ("m", "f"):
        valence = inputs.latent.get(speaker, (50.0, 50.0))[0]
        turns = [(s.start, s.end) for s in inputs.annotation.segments if s.label == speaker]
        chunks = []
        for i in range(n_chunks):
            lo, hi = i * CHUNK_S, (i + 1) * CHUNK_S
            spoken = sum(max(0.0, min(end, hi) - max(start, lo)) for start, end in turns)
            if spoken <= 0:
                chunks.append("")
                continue
            n_words = max(1, int(round(WORDS_PER_S * spoken)))
            words = draw_tokens(n_words, valence, effects.lexicon_positive_max, rng, filler_rate, xy_rate)
            chunks.append(" ".join(words))
        while chunks and not chunks[-1]:
            chunks.pop()
        out[speaker] = Transcript(speaker, tuple(chunks))
    return out


def synth_sensors(inputs: SensorInputs, config: SimConfig, rng: np.random.Generator, with_audio: bool = True) -> SessionSignals:
    effects, noise = config.effects, config.noise
    wearer_v, wearer_a = inputs.latent[inputs.wearer.speaker]
    hr = synth_hr(wearer_a, inputs.duration_s, effects, noise, config.hr_rate_hz, rng)
    accel, gyro = synth_imu(wearer_a, inputs.activity, inputs.duration_s, effects, noise, config.imu_rate_hz, rng)
    light = synth_light(inputs.activity, inputs.duration_s, rng)
    wear = synth_wear(inputs.duration_s, inputs.non_worn, rng)
    waveform = synth_audio(inputs, effects, noise, config.audio_sample_rate, rng) if with_audio else None
    transcripts = synth_transcripts(inputs, effects, config.behaviour.filler_rate, config.behaviour.xy_rate, rng)
    return SessionSignals(hr, accel, gyro, light, wear, waveform, config.audio_sample_rate, transcripts)
