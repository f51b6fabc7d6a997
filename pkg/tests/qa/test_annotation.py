import pytest

from qa.annotation import AnnotationTrack, Segment, format_annotation, parse_annotation


class TestParseAnnotation:
    def test_valid_lines(self):
        track = parse_annotation("0.0\t2.5\tm\n2.5\t4.0\tf\n10\t12\tu-tv/radio\n")
        assert track.segments == (
            Segment(0.0, 2.5, "m"),
            Segment(2.5, 4.0, "f"),
            Segment(10.0, 12.0, "u-tv/radio"),
        )
        assert track.rejected == ()

    @pytest.mark.parametrize(
        "line,reason",
        [
            ("0\t1", "expected 3"),
            ("a\t1\tm", "not numeric"),
            ("0\t1\tx", "unknown label"),
            ("3\t2\tm", "invalid interval"),
            ("-1\t2\tm", "invalid interval"),
            ("290\t301\tf", "beyond"),
        ],
    )
    def test_invalid_lines_rejected_with_line_number(self, line, reason):
        track = parse_annotation(f"0\t1\tm\n{line}\n")
        assert len(track.segments) == 1
        assert track.rejected[0].line_no == 2
        assert reason in track.rejected[0].reason

    def test_blank_lines_skipped(self):
        track = parse_annotation("\n0\t1\tc\r\n\n")
        assert track.labels() == ["c"]

    def test_empty_file_warns(self):
        assert parse_annotation("").warnings == ("empty_annotation",)


def test_formatted_track_parses_to_same_segments():
    track = AnnotationTrack((Segment(0.25, 1.5, "m"), Segment(3.0, 7.125, "n")))
    assert parse_annotation(format_annotation(track)).segments == track.segments
