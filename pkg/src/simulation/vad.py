"""Energy voice-activity detector standing in for the on-watch VAD model."""

import numpy as np

from domain.config_models import VadParams
from simulation.voice import speak

SPEECH_AMPLITUDE = 0.05
SPEECH_F0_HZ = 160.0
NOISE_SD = 0.002
# Pauses shorter than this between syllables do not end a speech run.
HANGOVER_MS = 200.0


def frame_rms(x: np.ndarray, params: VadParams) -> np.ndarray:
    frame = int(round(params.frame_ms * params.sample_rate / 1000.0))
    hop = int(round(params.hop_ms * params.sample_rate / 1000.0))
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] < frame:
        return np.empty(0)
    frames = np.lib.stride_tricks.sliding_window_view(x, frame)[::hop]
    return np.sqrt(np.mean(frames * frames, axis=1))


def speech_frames(x: np.ndarray, params: VadParams = VadParams()) -> np.ndarray:
    """Frames whose RMS exceeds ``threshold_ratio`` x the rolling noise floor.

    The floor is the minimum RMS over the trailing ``noise_window_ms`` of frames
    classified as non-speech; the first frame seeds it.
    """
    rms = frame_rms(x, params)
    flags = np.zeros(rms.shape[0], dtype=bool)
    if rms.shape[0] == 0:
        return flags
    window = max(1, int(round(params.noise_window_ms / params.hop_ms)))
    history = [max(rms[0], 1e-9)]
    for i, value in enumerate(rms):
        floor = max(min(history[-window:]), 1e-9)
        if value > params.threshold_ratio * floor:
            flags[i] = True
        else:
            history.append(max(value, 1e-9))
    return flags


def detect_speech(x: np.ndarray, params: VadParams = VadParams()) -> bool:
    """True when a speech run holds at least ``min_speech_ms`` of speech frames."""
    flags = speech_frames(x, params)
    needed = int(np.ceil(params.min_speech_ms / params.hop_ms))
    max_gap = int(round(HANGOVER_MS / params.hop_ms))
    voiced = 0
    gap = 0
    for flag in flags:
        if flag:
            voiced += 1
            gap = 0
        else:
            gap += 1
            if gap > max_gap:
                voiced = 0
        if voiced >= needed:
            return True
    return False


def synth_vad_snippet(speaking: bool, rng: np.random.Generator, params: VadParams = VadParams()) -> np.ndarray:
    """Short microphone capture: background noise, plus speech after a brief lead-in when ``speaking``."""
    n = int(round(params.snippet_s * params.sample_rate))
    x = rng.normal(0.0, NOISE_SD, n)
    if speaking:
        lead = float(rng.uniform(0.1, 0.3))
        speak(x, lead, params.snippet_s - lead, params.sample_rate, SPEECH_F0_HZ, SPEECH_AMPLITUDE, 1.0, rng)
    return x
