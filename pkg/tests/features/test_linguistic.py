import numpy as np
import pytest

from errors import DomainError
from features.linguistic import hashed_text_features, linguistic_document, tokenize
from qa.transcript import Transcript


def test_tokenize_drops_separators_inaudible_and_punctuation():
    assert tokenize("Hello, world! // XY Okay.") == ["hello", "world", "okay"]


class TestHashedTextFeatures:
    def test_unit_norm_and_deterministic(self):
        a = hashed_text_features("we went to the park today", 64)
        b = hashed_text_features("we went to the park today", 64)
        assert a.dim == 64
        assert np.linalg.norm(a.values) == pytest.approx(1.0)
        assert np.array_equal(a.values, b.values)

    def test_case_and_punctuation_insensitive(self):
        a = hashed_text_features("Dinner, tonight?", 32)
        b = hashed_text_features("dinner tonight", 32)
        assert np.array_equal(a.values, b.values)

    def test_empty_text_flagged_zero_vector(self):
        vector = hashed_text_features("XY // XY", 16)
        assert vector.flags == ("empty_text",)
        assert not vector.values.any()

    def test_dimension_floor(self):
        with pytest.raises(DomainError):
            hashed_text_features("hi", 4)


class TestLinguisticDocument:
    transcripts = {
        "m": Transcript("m", ("hi there",)),
        "f": Transcript("f", ("hello",)),
    }

    def test_partner_scope(self):
        assert linguistic_document(self.transcripts, "f", "partner") == "hello"

    def test_session_scope_joins_both(self):
        assert linguistic_document(self.transcripts, "f", "session") == "hi there hello"

    def test_missing_transcript(self):
        assert linguistic_document({"m": None}, "m") == ""

    def test_unknown_scope(self):
        with pytest.raises(DomainError):
            linguistic_document(self.transcripts, "m", "couple")
