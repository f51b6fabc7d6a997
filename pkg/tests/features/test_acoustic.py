import numpy as np
import pytest

from domain.models import Modality
from errors import DomainError, ValidationError
from features.acoustic import (
    ACOUSTIC_LITE_DIM,
    ACOUSTIC_LITE_NAMES,
    frame_descriptors,
    gemaps_lite,
    partner_speech_slices,
    speaker_intervals,
)
from qa.annotation import AnnotationTrack, Segment

RATE = 16000


def _tone(freq, seconds, amplitude=0.5):
    t = np.arange(int(seconds * RATE)) / RATE
    return amplitude * np.sin(2 * np.pi * freq * t)


def test_dimension_is_46():
    assert ACOUSTIC_LITE_DIM == 46
    assert len(set(ACOUSTIC_LITE_NAMES)) == 46


class TestSpeakerSlices:
    track = AnnotationTrack(
        (
            Segment(0.0, 1.0, "m"),
            Segment(0.5, 1.5, "m"),
            Segment(2.0, 3.0, "f"),
            Segment(4.0, 4.5, "m"),
        )
    )

    def test_overlapping_segments_merged(self):
        assert speaker_intervals(self.track, "m") == [(0.0, 1.5), (4.0, 4.5)]

    def test_slices_clipped_to_waveform(self):
        waveform = np.arange(RATE * 4, dtype=np.float64)
        slices = partner_speech_slices(waveform, self.track, "m", RATE)
        assert [s.shape[0] for s in slices] == [int(1.5 * RATE)]

    def test_invalid_speaker(self):
        with pytest.raises(DomainError):
            partner_speech_slices(np.zeros(10), self.track, "u", RATE)


class TestGemapsLite:
    def test_pitch_of_pure_tone(self):
        lld, voiced = frame_descriptors(_tone(200, 0.5), RATE)
        assert voiced.mean() > 0.9
        assert np.median(lld[voiced, 0]) == pytest.approx(200, rel=0.03)

    def test_noise_is_mostly_unvoiced(self):
        rng = np.random.default_rng(0)
        _, voiced = frame_descriptors(rng.normal(size=RATE // 2), RATE)
        assert voiced.mean() < 0.2

    def test_vector_shape_and_finiteness(self):
        vector = gemaps_lite([_tone(150, 0.8), _tone(220, 0.6)], RATE)
        assert vector.modality is Modality.ACOUSTIC
        assert vector.dim == ACOUSTIC_LITE_DIM
        assert vector.is_finite
        named = dict(zip(ACOUSTIC_LITE_NAMES, vector.values))
        assert 140 < named["f0_mean"] < 230
        assert named["loudness_mean"] > 0

    def test_louder_signal_has_higher_loudness(self):
        quiet = dict(zip(ACOUSTIC_LITE_NAMES, gemaps_lite([_tone(180, 1.2, 0.1)], RATE).values))
        loud = dict(zip(ACOUSTIC_LITE_NAMES, gemaps_lite([_tone(180, 1.2, 0.8)], RATE).values))
        assert loud["loudness_mean"] > quiet["loudness_mean"]

    def test_silence_flagged_unvoiced(self):
        vector = gemaps_lite([np.zeros(RATE * 2)], RATE)
        assert vector.flags == ("all_unvoiced",)
        assert vector.is_finite

    def test_under_one_second_unusable(self):
        with pytest.raises(ValidationError):
            gemaps_lite([_tone(200, 0.4), _tone(200, 0.4)], RATE)

    def test_segments_shorter_than_a_frame_unusable(self):
        # 1.25 s of speech in total, none of it long enough for one 25 ms frame
        fragments = [_tone(200, 399 / RATE) for _ in range(50)]
        with pytest.raises(ValidationError, match="no full analysis frame"):
            gemaps_lite(fragments, RATE)
