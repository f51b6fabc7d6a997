from domain.models import ArousalBin, EmotionLabel, Quadrant, ValenceBin
from errors import DomainError

# Affective Slider midpoint; values at the midpoint fall on the low/negative side.
SPLIT_POINT = 50.0

_QUADRANTS = {
    (ValenceBin.POSITIVE, ArousalBin.HIGH): Quadrant.Q1_HIGH_POS,
    (ValenceBin.NEGATIVE, ArousalBin.HIGH): Quadrant.Q2_HIGH_NEG,
    (ValenceBin.NEGATIVE, ArousalBin.LOW): Quadrant.Q3_LOW_NEG,
    (ValenceBin.POSITIVE, ArousalBin.LOW): Quadrant.Q4_LOW_POS,
}


def quadrant_of(valence_bin: ValenceBin, arousal_bin: ArousalBin) -> Quadrant:
    return _QUADRANTS[(ValenceBin(valence_bin), ArousalBin(arousal_bin))]


def binarize_affect(valence_raw: float, arousal_raw: float) -> EmotionLabel:
    for name, value in (("valence", valence_raw), ("arousal", arousal_raw)):
        if value is None or not 0.0 <= float(value) <= 100.0:
            raise DomainError(f"{name} rating {value!r} outside [0, 100]")
    valence_bin = ValenceBin.POSITIVE if valence_raw > SPLIT_POINT else ValenceBin.NEGATIVE
    arousal_bin = ArousalBin.HIGH if arousal_raw > SPLIT_POINT else ArousalBin.LOW
    return EmotionLabel(valence_bin, arousal_bin, quadrant_of(valence_bin, arousal_bin))
