from pathlib import Path

from errors import ParseError
from infrastructure.parsers.base_parser import ArtifactParser
from qa.transcript import Transcript, parse_transcript


class TranscriptParser(ArtifactParser):
    """Parser for ``//``-chunked transcripts of one partner."""

    def __init__(self, speaker: str):
        self.speaker = speaker

    def parse(self, file_path: Path) -> Transcript:
        try:
            text = file_path.read_text(encoding="utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"{file_path.name}: not UTF-8 ({exc})") from exc
        return parse_transcript(text, self.speaker)
