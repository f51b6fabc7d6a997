"""Per-partner transcripts written in 15-second chunks separated by ``//``."""

from dataclasses import dataclass
from typing import List, Optional, Tuple

from errors import DomainError
from logging_config import get_logger

LOGGER = get_logger("qa.transcript")

CHUNK_SEPARATOR = "//"
CHUNK_S = 15.0
MAX_CHUNKS = 20
INAUDIBLE = "XY"


@dataclass(frozen=True)
class Transcript:
    speaker: str
    chunks: Tuple[str, ...] = ()
    warnings: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.speaker not in ("m", "f"):
            raise DomainError(f"transcript speaker must be 'm' or 'f', got {self.speaker!r}")

    def chunk_tokens(self) -> List[List[str]]:
        return [chunk.split() for chunk in self.chunks]

    def tokens(self) -> List[str]:
        return [tok for chunk in self.chunk_tokens() for tok in chunk]

    def non_empty_chunks(self) -> List[int]:
        return [i for i, chunk in enumerate(self.chunks) if chunk.strip()]

    @property
    def is_empty(self) -> bool:
        return not self.non_empty_chunks()

    def text(self) -> str:
        return " ".join(self.tokens())

    def chunk_window(self, index: int) -> Tuple[float, float]:
        return index * CHUNK_S, (index + 1) * CHUNK_S


def parse_transcript(text: str, speaker: str, max_chunks: int = MAX_CHUNKS) -> Transcript:
    parts = [part.strip() for part in text.split(CHUNK_SEPARATOR)]
    # A closing separator leaves one empty trailing chunk.
    if parts and not parts[-1]:
        parts.pop()
    warnings: Tuple[str, ...] = ()
    if len(parts) > max_chunks:
        warnings = (f"too_many_chunks:{len(parts)}",)
        LOGGER.warning("transcript %s has %d chunks, more than %d", speaker, len(parts), max_chunks)
    return Transcript(speaker, tuple(parts), warnings)


def format_transcript(transcript: Transcript) -> str:
    return "".join(f"{chunk} {CHUNK_SEPARATOR}\n" if chunk else f"{CHUNK_SEPARATOR}\n" for chunk in transcript.chunks)


def xy_pct(transcript: Transcript) -> Optional[float]:
    """Share of inaudible ``XY`` tokens in percent; None when there are no tokens."""
    tokens = transcript.tokens()
    if not tokens:
        return None
    return 100.0 * sum(1 for tok in tokens if tok == INAUDIBLE) / len(tokens)
