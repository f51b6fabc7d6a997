from dataclasses import replace

import numpy as np
import pytest

from errors import ParseError
from infrastructure.corpus_repository import CorpusRepository
from services.qa_service import QaService, load_ratings, read_qa_report, write_qa_report


@pytest.fixture(scope="module")
def qa_report(small_world):
    _, summary = small_world
    repo = CorpusRepository(summary.root)
    return QaService(repo).run(repo.load_corpus(), ratings=np.array([[9, 2, 5, 8], [6, 1, 3, 2], [8, 4, 6, 8]], float))


def test_simulated_corpus_is_consistent(qa_report):
    assert qa_report.violations == []
    assert qa_report.flagged_sessions == []


def test_transcript_chunks_meet_annotated_turns(qa_report):
    overlaps = [r.value for r in qa_report.rows if r.check.startswith("chunk_overlap_")]
    assert overlaps
    assert set(overlaps) <= {"100.0", "N/A"}


def test_icc_row_appended(qa_report):
    assert qa_report.icc_variant == "ICC(2,1)"
    assert qa_report.rows[-1].check == "icc"
    assert qa_report.icc_value == pytest.approx(float(qa_report.rows[-1].value), abs=1e-6)


def test_report_round_trip(tmp_path, qa_report):
    path = tmp_path / "qa" / "qa_report.csv"
    write_qa_report(path, qa_report)
    variant, frame = read_qa_report(path)
    assert variant == "ICC(2,1)"
    assert len(frame) == len(qa_report.rows)
    assert list(frame.columns) == ["session_id", "check", "value"]


def test_broken_code_is_flagged(small_world, tmp_path):
    _, summary = small_world
    repo = CorpusRepository(summary.root)
    corpus = repo.load_corpus()
    victim = next(c for c in corpus.codes if c.male_spoke and c.female_spoke)
    corpus.codes = [
        c if c.session_id != victim.session_id else replace(c, interaction_partner="stranger")
        for c in corpus.codes
    ]
    report = QaService(repo, jobs=2).run(corpus)
    assert victim.session_id in report.flagged_sessions
    assert any(r.check == "rule_a" for r in report.violations)


class TestLoadRatings:
    def test_leading_id_column_dropped(self, tmp_path):
        path = tmp_path / "ratings.csv"
        path.write_text("item,r1,r2\na,1,2\nb,3,4\n", encoding="utf-8")
        assert load_ratings(path).tolist() == [[1.0, 2.0], [3.0, 4.0]]

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_ratings(tmp_path / "none.csv")
