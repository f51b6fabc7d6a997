import pytest

from errors import ParseError
from infrastructure.parsers.annotation_parser import AnnotationParser
from infrastructure.parsers.parser_factory import ParserFactory
from infrastructure.parsers.series_parser import SeriesParser
from infrastructure.parsers.transcript_parser import TranscriptParser


def test_parser_factory_returns_annotation_parser():
    parser = ParserFactory.get_parser("annotation")
    assert isinstance(parser, AnnotationParser)


@pytest.mark.parametrize("kind,speaker", [("transcript_m", "m"), ("transcript_f", "f")])
def test_parser_factory_returns_transcript_parser_for_speaker(kind, speaker):
    parser = ParserFactory.get_parser(kind)
    assert isinstance(parser, TranscriptParser)
    assert parser.speaker == speaker


@pytest.mark.parametrize("kind", ["hr", "accel", "gyro", "light", "wear"])
def test_parser_factory_returns_series_parser(kind):
    parser = ParserFactory.get_parser(kind)
    assert isinstance(parser, SeriesParser)
    assert parser.name == kind


def test_parser_factory_unknown_kind_raises():
    with pytest.raises(ParseError):
        ParserFactory.get_parser("audio")
