"""Linguistic features: signed feature hashing over transcript tokens."""

import hashlib
from typing import Iterable, Mapping, Optional

import numpy as np

from domain.models import FeatureVector, Modality
from errors import DomainError
from qa.transcript import CHUNK_SEPARATOR, INAUDIBLE, Transcript

DEFAULT_HASH_DIM = 256
MIN_HASH_DIM = 8
DOCUMENT_SCOPES = ("partner", "session")

_STRIP = ".,;:!?\"'()[]"


def tokenize(text: str) -> list:
    tokens = []
    for raw in text.split():
        if raw == CHUNK_SEPARATOR or raw == INAUDIBLE:
            continue
        tok = raw.strip(_STRIP).lower()
        if tok:
            tokens.append(tok)
    return tokens


def _bucket(token: str, dim: int):
    digest = int.from_bytes(hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(), "big")
    sign = -1.0 if digest >> 63 else 1.0
    return digest % dim, sign


def hashed_text_features(text: str, dim: int = DEFAULT_HASH_DIM) -> FeatureVector:
    """L2-normalised signed bag of words; empty text gives a flagged zero vector."""
    if dim < MIN_HASH_DIM:
        raise DomainError(f"hash dimension must be >= {MIN_HASH_DIM}, got {dim}")
    values = np.zeros(dim, dtype=np.float64)
    for token in tokenize(text):
        index, sign = _bucket(token, dim)
        values[index] += sign
    norm = np.linalg.norm(values)
    if norm == 0.0:
        return FeatureVector(Modality.LINGUISTIC, values, flags=("empty_text",))
    return FeatureVector(Modality.LINGUISTIC, values / norm)


def linguistic_document(
    transcripts: Mapping[str, Optional[Transcript]],
    speaker: str,
    scope: str = "partner",
) -> str:
    """Text embedded for one partner: their own turns, or the whole conversation."""
    if scope not in DOCUMENT_SCOPES:
        raise DomainError(f"document scope must be one of {DOCUMENT_SCOPES}, got {scope!r}")
    speakers: Iterable[str] = (speaker,) if scope == "partner" else ("m", "f")
    parts = [transcripts[s].text() for s in speakers if transcripts.get(s) is not None]
    return " ".join(p for p in parts if p)
