from pathlib import Path

from errors import ParseError
from infrastructure.parsers.base_parser import ArtifactParser
from qa.annotation import MAX_DURATION_S, AnnotationTrack, parse_annotation


class AnnotationParser(ArtifactParser):
    """Parser for tab-separated speaker-turn tracks (``annotation.txt``)."""

    def __init__(self, max_duration_s: float = MAX_DURATION_S):
        self.max_duration_s = max_duration_s

    def parse(self, file_path: Path) -> AnnotationTrack:
        try:
            text = file_path.read_text(encoding="utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"{file_path.name}: not UTF-8 ({exc})") from exc
        return parse_annotation(text, self.max_duration_s)
