"""Sentiment-tagged Swiss-German-flavoured token lexicon for synthetic transcripts."""

from typing import List

import numpy as np

from errors import DomainError
from qa.transcript import INAUDIBLE

POSITIVE = (
    "gut", "schön", "super", "freude", "lieb", "danke", "toll", "glücklich",
    "gern", "lachen", "prima", "herzlich", "zufrieden", "fein", "genial", "wunderbar",
)
NEGATIVE = (
    "schlecht", "müde", "schmerz", "ärger", "traurig", "sorge", "stress", "angst",
    "leider", "nervig", "mühsam", "krank", "böse", "schwierig", "doof", "problem",
)
FILLERS = (
    "ja", "nei", "also", "und", "dänn", "mer", "ich", "du", "das", "isch",
    "hüt", "morn", "chunnsch", "gsi", "gah", "öppis", "eh", "hm",
)

_POSITIVE_SET = frozenset(POSITIVE)
_NEGATIVE_SET = frozenset(NEGATIVE)


def positive_probability(valence: float, p_max: float) -> float:
    """Share of sentiment words that are positive: 1-p_max at valence 0, p_max at 100."""
    if not 0.0 <= valence <= 100.0:
        raise DomainError(f"valence {valence} outside [0, 100]")
    return (1.0 - p_max) + (2.0 * p_max - 1.0) * valence / 100.0


def draw_tokens(
    n: int,
    valence: float,
    p_max: float,
    rng: np.random.Generator,
    filler_rate: float = 0.0,
    xy_rate: float = 0.0,
) -> List[str]:
    p_pos = positive_probability(valence, p_max)
    tokens = []
    for _ in range(n):
        u = rng.random()
        if u < xy_rate:
            tokens.append(INAUDIBLE)
        elif u < xy_rate + filler_rate:
            tokens.append(FILLERS[rng.integers(len(FILLERS))])
        elif rng.random() < p_pos:
            tokens.append(POSITIVE[rng.integers(len(POSITIVE))])
        else:
            tokens.append(NEGATIVE[rng.integers(len(NEGATIVE))])
    return tokens


def is_positive(token: str) -> bool:
    return token in _POSITIVE_SET


def is_negative(token: str) -> bool:
    return token in _NEGATIVE_SET
