"""Harmonic voice synthesis shared by the VAD snippets and the session audio."""

from typing import List, Tuple

import numpy as np

N_HARMONICS = 10
SYLLABLE_S = (0.15, 0.30)
GAP_S = (0.05, 0.15)


def harmonic_burst(
    f0_hz: float,
    duration_s: float,
    sample_rate: int,
    amplitude: float,
    tilt: float,
    phase: float = 0.0,
) -> np.ndarray:
    """Sum of harmonics with 1/k**tilt amplitudes under a Hann envelope, scaled to ``amplitude`` RMS."""
    n = max(int(round(duration_s * sample_rate)), 1)
    t = np.arange(n) / sample_rate
    nyquist = sample_rate / 2.0
    wave = np.zeros(n)
    for k in range(1, N_HARMONICS + 1):
        if k * f0_hz >= nyquist:
            break
        wave += np.sin(2 * np.pi * k * f0_hz * t + k * phase) / k**tilt
    wave *= np.hanning(n) if n > 2 else 1.0
    rms = np.sqrt(np.mean(wave * wave))
    return wave * (amplitude / rms) if rms > 0 else wave


def syllable_plan(duration_s: float, rng: np.random.Generator) -> List[Tuple[float, float]]:
    """(offset, length) of voiced syllables filling ``duration_s`` with short pauses."""
    plan = []
    pos = 0.0
    while True:
        length = float(rng.uniform(*SYLLABLE_S))
        if pos + length > duration_s:
            break
        plan.append((pos, length))
        pos += length + float(rng.uniform(*GAP_S))
    return plan


def speak(
    out: np.ndarray,
    start_s: float,
    duration_s: float,
    sample_rate: int,
    f0_hz: float,
    amplitude: float,
    tilt: float,
    rng: np.random.Generator,
) -> None:
    """Add a run of syllables into ``out`` in place, starting at ``start_s``."""
    for offset, length in syllable_plan(duration_s, rng):
        f0 = f0_hz * float(rng.uniform(0.97, 1.03))
        burst = harmonic_burst(f0, length, sample_rate, amplitude, tilt, float(rng.uniform(0, 2 * np.pi)))
        i0 = int(round((start_s + offset) * sample_rate))
        i1 = min(out.shape[0], i0 + burst.shape[0])
        if i1 > i0:
            out[i0:i1] += burst[: i1 - i0]
