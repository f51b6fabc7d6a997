"""GeMAPS-lite acoustic features computed from the partner's own speech turns.

Twelve frame-level descriptors (25 ms frames, 10 ms hop) are summarised by the
GeMAPS functionals: mean and coefficient of variation for every descriptor,
percentile and slope statistics for pitch and loudness, and temporal statistics
of loudness peaks and voiced/unvoiced regions. 46 values in total.
"""

from typing import List, Sequence, Tuple

import numpy as np
from scipy.fft import dct

from domain.models import FeatureVector, Modality
from errors import DomainError, ValidationError
from logging_config import get_logger
from qa.annotation import AnnotationTrack

LOGGER = get_logger("features.acoustic")

FRAME_S = 0.025
HOP_S = 0.010
F0_MIN_HZ = 60.0
F0_MAX_HZ = 400.0
VOICING_THRESHOLD = 0.45
MIN_SPEECH_S = 1.0
N_MEL = 26
MEL_FMAX_HZ = 8000.0
N_MFCC = 4
LOG_FLOOR = 1e-10

LLD_NAMES = (
    "f0",
    "loudness",
    "spectral_centroid",
    "alpha_ratio",
    "hammarberg_index",
    "slope_0_500",
    "slope_500_1500",
    "spectral_flux",
    "mfcc1",
    "mfcc2",
    "mfcc3",
    "mfcc4",
)
_CONTOUR_FUNCTIONALS = ("p20", "p50", "p80", "p20_80_range", "rise_mean", "rise_sd", "fall_mean", "fall_sd")
_TEMPORAL_FUNCTIONALS = (
    "loudness_peaks_per_s",
    "voiced_len_mean",
    "voiced_len_sd",
    "unvoiced_len_mean",
    "unvoiced_len_sd",
    "voiced_segments_per_s",
)
ACOUSTIC_LITE_NAMES = tuple(
    [f"{lld}_{fn}" for lld in LLD_NAMES for fn in ("mean", "cov")]
    + [f"f0_{fn}" for fn in _CONTOUR_FUNCTIONALS]
    + [f"loudness_{fn}" for fn in _CONTOUR_FUNCTIONALS]
    + list(_TEMPORAL_FUNCTIONALS)
)
ACOUSTIC_LITE_DIM = len(ACOUSTIC_LITE_NAMES)


def speaker_intervals(annotation: AnnotationTrack, speaker: str) -> List[Tuple[float, float]]:
    """Union of the annotation segments carrying ``speaker``'s label."""
    spans = sorted((s.start, s.end) for s in annotation.segments if s.label == speaker)
    merged: List[Tuple[float, float]] = []
    for start, end in spans:
        if merged and start <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return merged


def partner_speech_slices(
    waveform: np.ndarray,
    annotation: AnnotationTrack,
    speaker: str,
    sample_rate: int,
) -> List[np.ndarray]:
    if speaker not in ("m", "f"):
        raise DomainError(f"speaker must be 'm' or 'f', got {speaker!r}")
    x = np.asarray(waveform, dtype=np.float64)
    slices = []
    for start, end in speaker_intervals(annotation, speaker):
        i0 = int(round(start * sample_rate))
        i1 = min(x.shape[0], int(round(end * sample_rate)))
        if i1 > i0:
            slices.append(x[i0:i1])
    return slices


def _frame(x: np.ndarray, frame_len: int, hop: int) -> np.ndarray:
    if x.shape[0] < frame_len:
        return np.empty((0, frame_len))
    return np.lib.stride_tricks.sliding_window_view(x, frame_len)[::hop]


def _next_pow2(n: int) -> int:
    return 1 << int(np.ceil(np.log2(max(n, 2))))


def _pitch(frames: np.ndarray, sample_rate: int) -> Tuple[np.ndarray, np.ndarray]:
    """Normalised-autocorrelation F0 per frame; returns (f0_hz, voiced mask)."""
    n_frames, length = frames.shape
    n_fft = _next_pow2(2 * length)
    spectrum = np.fft.rfft(frames, n_fft, axis=1)
    acf = np.fft.irfft(np.abs(spectrum) ** 2, n_fft, axis=1)[:, :length]

    lag_min = max(1, int(np.floor(sample_rate / F0_MAX_HZ)))
    lag_max = min(int(np.ceil(sample_rate / F0_MIN_HZ)), length - 2)
    lags = np.arange(lag_min, lag_max + 1)

    csum = np.cumsum(frames * frames, axis=1)
    total = csum[:, -1]
    head = csum[:, length - lags - 1]
    tail = total[:, None] - csum[:, lags - 1]
    denom = np.sqrt(head * tail)
    r = np.divide(acf[:, lags], denom, out=np.zeros_like(denom), where=denom > 1e-12)

    best = r.max(axis=1)
    # First lag close to the best peak, then the local maximum after it (avoids octave errors).
    first = np.argmax(r >= 0.9 * best[:, None], axis=1)
    width = first // 2 + 2
    offsets = np.arange(int(width.max()) + 1)
    idx = np.minimum(first[:, None] + offsets[None, :], len(lags) - 1)
    window = np.take_along_axis(r, idx, axis=1)
    window = np.where(offsets[None, :] <= width[:, None], window, -np.inf)
    j = np.take_along_axis(idx, np.argmax(window, axis=1)[:, None], axis=1).ravel()

    peak = r[np.arange(n_frames), j]
    left = r[np.arange(n_frames), np.maximum(j - 1, 0)]
    right = r[np.arange(n_frames), np.minimum(j + 1, len(lags) - 1)]
    curvature = left - 2 * peak + right
    shift = np.where(curvature < 0, 0.5 * (left - right) / np.where(curvature < 0, curvature, -1.0), 0.0)
    shift = np.clip(shift, -0.5, 0.5)

    voiced = peak >= VOICING_THRESHOLD
    f0 = np.where(voiced, sample_rate / (lags[j] + shift), 0.0)
    return f0, voiced


def _mel_filterbank(n_fft: int, sample_rate: int) -> np.ndarray:
    fmax = min(MEL_FMAX_HZ, sample_rate / 2)
    to_mel = lambda f: 2595.0 * np.log10(1.0 + f / 700.0)  # noqa: E731
    to_hz = lambda m: 700.0 * (10 ** (m / 2595.0) - 1.0)  # noqa: E731
    edges = to_hz(np.linspace(0.0, to_mel(fmax), N_MEL + 2))
    freqs = np.fft.rfftfreq(n_fft, 1.0 / sample_rate)
    bank = np.zeros((N_MEL, freqs.shape[0]))
    for i in range(N_MEL):
        lo, mid, hi = edges[i], edges[i + 1], edges[i + 2]
        rising = (freqs - lo) / max(mid - lo, 1e-9)
        falling = (hi - freqs) / max(hi - mid, 1e-9)
        bank[i] = np.clip(np.minimum(rising, falling), 0.0, None)
    return bank


def _band_slope(db: np.ndarray, freqs: np.ndarray, lo: float, hi: float) -> np.ndarray:
    mask = (freqs >= lo) & (freqs <= hi)
    if mask.sum() < 2:
        return np.zeros(db.shape[0])
    f = freqs[mask] / 1000.0
    fc = f - f.mean()
    y = db[:, mask]
    return (y - y.mean(axis=1, keepdims=True)) @ fc / np.sum(fc * fc)


def _band_max(db: np.ndarray, freqs: np.ndarray, lo: float, hi: float) -> np.ndarray:
    mask = (freqs >= lo) & (freqs < hi)
    if not mask.any():
        return np.zeros(db.shape[0])
    return db[:, mask].max(axis=1)


def frame_descriptors(segment: np.ndarray, sample_rate: int) -> Tuple[np.ndarray, np.ndarray]:
    """Per-frame LLD matrix (n_frames x 12, columns in LLD_NAMES order) and voicing mask."""
    frame_len = int(round(FRAME_S * sample_rate))
    hop = int(round(HOP_S * sample_rate))
    frames = _frame(np.asarray(segment, dtype=np.float64), frame_len, hop)
    if frames.shape[0] == 0:
        return np.empty((0, len(LLD_NAMES))), np.zeros(0, dtype=bool)

    f0, voiced = _pitch(frames, sample_rate)
    loudness = np.sqrt(np.mean(frames * frames, axis=1))

    n_fft = _next_pow2(frame_len)
    power = np.abs(np.fft.rfft(frames * np.hamming(frame_len), n_fft, axis=1)) ** 2
    freqs = np.fft.rfftfreq(n_fft, 1.0 / sample_rate)
    total = power.sum(axis=1)
    centroid = np.divide(power @ freqs, total, out=np.zeros_like(total), where=total > 0)

    low = power[:, (freqs >= 50) & (freqs < 1000)].sum(axis=1)
    high = power[:, (freqs >= 1000) & (freqs < 5000)].sum(axis=1)
    alpha = 10.0 * np.log10((low + LOG_FLOOR) / (high + LOG_FLOOR))

    db = 10.0 * np.log10(power + LOG_FLOOR)
    hammarberg = _band_max(db, freqs, 0, 2000) - _band_max(db, freqs, 2000, 5000)
    slope_low = _band_slope(db, freqs, 0, 500)
    slope_mid = _band_slope(db, freqs, 500, 1500)

    mag = np.sqrt(power)
    mag_sum = mag.sum(axis=1, keepdims=True)
    norm = np.divide(mag, mag_sum, out=np.zeros_like(mag), where=mag_sum > 0)
    flux = np.zeros(frames.shape[0])
    flux[1:] = np.sum(np.diff(norm, axis=0) ** 2, axis=1)

    mel = power @ _mel_filterbank(n_fft, sample_rate).T
    cepstra = dct(np.log(np.maximum(mel, LOG_FLOOR)), type=2, norm="ortho", axis=1)[:, 1 : N_MFCC + 1]

    lld = np.column_stack([f0, loudness, centroid, alpha, hammarberg, slope_low, slope_mid, flux, cepstra])
    return lld, voiced


def _mean_cov(values: np.ndarray) -> Tuple[float, float]:
    if values.size == 0:
        return 0.0, 0.0
    mean = float(values.mean())
    sd = float(values.std())
    return mean, (sd / abs(mean) if abs(mean) > 1e-12 else 0.0)


def _runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """[start, end) index runs where mask is True."""
    padded = np.concatenate([[False], mask.astype(bool), [False]])
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return list(zip(edges[0::2], edges[1::2]))


def _slope_stats(contours: Sequence[np.ndarray]) -> Tuple[float, float, float, float]:
    rising: List[float] = []
    falling: List[float] = []
    for contour in contours:
        if contour.size < 2:
            continue
        delta = np.diff(contour) / HOP_S
        for start, end in _runs(delta > 0):
            rising.append(float(delta[start:end].mean()))
        for start, end in _runs(delta < 0):
            falling.append(float(delta[start:end].mean()))

    def stats(xs: List[float]) -> Tuple[float, float]:
        return (float(np.mean(xs)), float(np.std(xs))) if xs else (0.0, 0.0)

    return stats(rising) + stats(falling)


def _contour_functionals(values: np.ndarray, contours: Sequence[np.ndarray]) -> List[float]:
    if values.size == 0:
        return [0.0] * len(_CONTOUR_FUNCTIONALS)
    p20, p50, p80 = np.percentile(values, [20, 50, 80])
    return [float(p20), float(p50), float(p80), float(p80 - p20), *_slope_stats(contours)]


def gemaps_lite(segments: Sequence[np.ndarray], sample_rate: int) -> FeatureVector:
    segments = [np.asarray(s, dtype=np.float64) for s in segments if len(s)]
    total_s = sum(s.shape[0] for s in segments) / float(sample_rate)
    if not segments or total_s < MIN_SPEECH_S:
        raise ValidationError(f"acoustic: {total_s:.2f}s of speech, need at least {MIN_SPEECH_S:g}s")

    per_segment = [frame_descriptors(s, sample_rate) for s in segments]
    per_segment = [(lld, voiced) for lld, voiced in per_segment if lld.shape[0]]
    if not per_segment:
        raise ValidationError(f"acoustic: no full analysis frame in {len(segments)} speech segments")
    lld =np.vstack([p[0] for p in per_segment])
    voiced = np.concatenate([p[1] for p in per_segment])

    flags: Tuple[str, ...] = ()
    if not voiced.any():
        flags = ("all_unvoiced",)

    values: List[float] = []
    for col, name in enumerate(LLD_NAMES):
        column = lld[voiced, col] if name == "f0" else lld[:, col]
        values.extend(_mean_cov(column))

    f0_contours = []
    loud_contours = []
    voiced_lengths: List[float] = []
    unvoiced_lengths: List[float] = []
    peaks = 0
    for seg_lld, seg_voiced in per_segment:
        for start, end in _runs(seg_voiced):
            f0_contours.append(seg_lld[start:end, 0])
            voiced_lengths.append((end - start) * HOP_S)
        for start, end in _runs(~seg_voiced):
            unvoiced_lengths.append((end - start) * HOP_S)
        loud = seg_lld[:, 1]
        loud_contours.append(loud)
        if loud.size >= 3:
            inner = loud[1:-1]
            peaks += int(np.sum((inner > loud[:-2]) & (inner >= loud[2:]) & (inner > 0)))

    values.extend(_contour_functionals(lld[voiced, 0], f0_contours))
    values.extend(_contour_functionals(lld[:, 1], loud_contours))

    def mean_sd(xs: List[float]) -> Tuple[float, float]:
        return (float(np.mean(xs)), float(np.std(xs))) if xs else (0.0, 0.0)

    values.append(peaks / total_s)
    values.extend(mean_sd(voiced_lengths))
    values.extend(mean_sd(unvoiced_lengths))
    values.append(len(voiced_lengths) / total_s)

    if flags:
        LOGGER.debug("acoustic features flagged: %s", ",".join(flags))
    return FeatureVector(Modality.ACOUSTIC, np.asarray(values, dtype=np.float64), flags=flags)
