import numpy as np
import pytest

from errors import DomainError, ValidationError
from learning.standardizer import Standardizer, apply_standardizer, fit_standardizer
from learning.weights import balanced_weights, sample_weights


class TestBalancedWeights:
    def test_nine_to_one(self):
        weights = balanced_weights([0] * 9 + [1])
        assert weights[0] == pytest.approx(10 / 18)
        assert weights[1] == pytest.approx(5.0)

    def test_classes_contribute_equally(self):
        labels = np.array([0] * 30 + [1] * 7)
        w = sample_weights(labels, balanced_weights(labels))
        assert w[labels == 0].sum() == pytest.approx(w[labels == 1].sum())

    def test_single_class_rejected(self):
        with pytest.raises(DomainError):
            balanced_weights([1, 1, 1])

    def test_unweighted_is_all_ones(self):
        assert sample_weights([0, 1, 1]).tolist() == [1.0, 1.0, 1.0]


class TestStandardizer:
    def test_train_statistics_applied_to_new_rows(self):
        train = np.array([[1.0, 5.0], [3.0, 5.0]])
        stats = fit_standardizer(train)
        out = apply_standardizer(stats, np.array([[2.0, 7.0], [5.0, 1.0]]))
        assert out[:, 0].tolist() == pytest.approx([0.0, 3.0])
        # constant training column maps to zero
        assert out[:, 1].tolist() == [0.0, 0.0]

    def test_dict_round_trip(self):
        stats = fit_standardizer(np.arange(12.0).reshape(4, 3))
        again = Standardizer.from_dict(stats.to_dict())
        assert np.array_equal(again.mean, stats.mean)
        assert np.array_equal(again.std, stats.std)

    def test_shape_checks(self):
        with pytest.raises(ValidationError):
            fit_standardizer(np.zeros((0, 3)))
        stats = fit_standardizer(np.ones((2, 3)))
        with pytest.raises(ValidationError):
            apply_standardizer(stats, np.ones((2, 2)))
