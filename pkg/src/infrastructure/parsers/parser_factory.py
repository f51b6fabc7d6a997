from infrastructure.parsers.annotation_parser import AnnotationParser
from infrastructure.parsers.base_parser import ArtifactParser
from infrastructure.parsers.series_parser import SERIES_COLUMNS, SeriesParser
from infrastructure.parsers.transcript_parser import TranscriptParser
from errors import ParseError

# Transcript kinds carry the speaker after the underscore.
_TRANSCRIPT_SPEAKERS = {"transcript_m": "m", "transcript_f": "f"}


class ParserFactory:
    """Factory for creating the ArtifactParser that reads one kind of session file."""

    @staticmethod
    def get_parser(kind: str) -> ArtifactParser:
        if kind == "annotation":
            return AnnotationParser()
        if kind in _TRANSCRIPT_SPEAKERS:
            return TranscriptParser(_TRANSCRIPT_SPEAKERS[kind])
        if kind in SERIES_COLUMNS:
            return SeriesParser(kind)
        raise ParseError(f"no parser for artifact kind {kind!r}")
