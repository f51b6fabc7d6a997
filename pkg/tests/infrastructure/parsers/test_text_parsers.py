import pytest

from errors import ParseError
from infrastructure.parsers.annotation_parser import AnnotationParser
from infrastructure.parsers.transcript_parser import TranscriptParser


def test_annotation_parser_reads_segments(tmp_path):
    path = tmp_path / "annotation.txt"
    path.write_text("0.000\t2.000\tm\n2.500\t4.000\tf\nbad line\n", encoding="utf-8")
    track = AnnotationParser().parse(path)
    assert track.labels() == ["m", "f"]
    assert track.rejected[0].line_no == 3


def test_annotation_parser_honours_duration_limit(tmp_path):
    path = tmp_path / "annotation.txt"
    path.write_text("50\t70\tm\n", encoding="utf-8")
    assert AnnotationParser(max_duration_s=60).parse(path).segments == ()


def test_transcript_parser_keeps_speaker(tmp_path):
    path = tmp_path / "transcript_f.txt"
    path.write_text("gut ja //\n//\n", encoding="utf-8")
    transcript = TranscriptParser("f").parse(path)
    assert transcript.speaker == "f"
    assert transcript.chunks == ("gut ja", "")


@pytest.mark.parametrize("parser", [AnnotationParser(), TranscriptParser("m")])
def test_non_utf8_raises_parse_error(tmp_path, parser):
    path = tmp_path / "artifact.txt"
    path.write_bytes(b"\xff\xfe\x00bad")
    with pytest.raises(ParseError):
        parser.parse(path)
