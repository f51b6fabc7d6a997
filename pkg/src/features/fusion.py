from typing import Sequence

import numpy as np

from domain.models import MODALITY_ORDER, FeatureVector, Modality
from errors import ValidationError


def fuse(vectors: Sequence[FeatureVector]) -> FeatureVector:
    """Feature-level fusion: concatenate in canonical modality order and keep column spans."""
    if not vectors:
        raise ValidationError("fuse needs at least one feature vector")
    by_modality = {}
    for vector in vectors:
        if vector.modality is Modality.FUSED:
            raise ValidationError("fused vectors cannot be fused again")
        if vector.modality in by_modality:
            raise ValidationError(f"duplicate modality {vector.modality.value} in fusion")
        by_modality[vector.modality] = vector
    if len(vectors) == 1:
        return vectors[0]

    parts = []
    spans = []
    flags = []
    offset = 0
    for modality in MODALITY_ORDER:
        vector = by_modality.get(modality)
        if vector is None:
            continue
        parts.append(vector.values)
        spans.append((modality, offset, offset + vector.dim))
        flags.extend(f"{modality.value}:{flag}" for flag in vector.flags)
        offset += vector.dim
    return FeatureVector(Modality.FUSED, np.concatenate(parts), flags=tuple(flags), spans=tuple(spans))
