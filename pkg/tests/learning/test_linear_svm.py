import numpy as np
import pytest

from errors import ValidationError
from evaluation.metrics import confusion, uar
from learning.linear_svm import LinearSvm, train_linear_svm
from learning.weights import balanced_weights


def _imbalanced(seed=0):
    rng = np.random.default_rng(seed)
    X = np.concatenate([rng.normal(0.0, 1.0, (900, 1)), rng.normal(1.0, 1.0, (100, 1))])
    y = np.array([0] * 900 + [1] * 100)
    return X, y


class TestLinearSvm:
    def test_separable_data_fit(self):
        X = np.array([[-2.0, 0.0], [-1.5, 1.0], [-1.0, -1.0], [1.0, 0.5], [1.5, -0.5], [2.0, 1.0]])
        y = np.array([0, 0, 0, 1, 1, 1])
        model = train_linear_svm(X, y, C=10.0)
        assert model.predict(X).tolist() == y.tolist()
        assert model.w[0] > 0
        assert model.objective[-1] < model.objective[0]

    def test_accepts_signed_labels(self):
        X = np.array([[-1.0], [-2.0], [1.0], [2.0]])
        a = train_linear_svm(X, np.array([0, 0, 1, 1]))
        b = train_linear_svm(X, np.array([-1, -1, 1, 1]))
        assert np.allclose(a.w, b.w) and a.b == pytest.approx(b.b)

    def test_training_is_deterministic(self):
        X, y = _imbalanced()
        a = train_linear_svm(X, y, epochs=50)
        b = train_linear_svm(X, y, epochs=50)
        assert np.array_equal(a.w, b.w) and a.b == b.b

    def test_seed_fixes_the_shuffle(self):
        X, y = _imbalanced()
        a = train_linear_svm(X, y, seed=1, epochs=20)
        b = train_linear_svm(X, y, seed=1, epochs=20)
        c = train_linear_svm(X, y, seed=2, epochs=20)
        assert np.array_equal(a.w, b.w) and a.b == b.b
        assert not np.array_equal(a.w, c.w)

    def test_seeds_agree_once_converged(self):
        X, y = _imbalanced()
        runs = [train_linear_svm(X, y, weights=balanced_weights(y), seed=s) for s in range(3)]
        preds = [m.predict(X) for m in runs]
        assert all((p == preds[0]).mean() > 0.9 for p in preds[1:])

    def test_small_set_is_one_batch_per_epoch(self):
        X = np.array([[-1.0], [-2.0], [1.0], [2.0]])
        y = np.array([0, 0, 1, 1])
        a = train_linear_svm(X, y, seed=0)
        b = train_linear_svm(X, y, seed=9)
        assert np.allclose(a.w, b.w) and a.b == pytest.approx(b.b)

    def test_class_weighting_recovers_minority(self):
        X, y = _imbalanced()
        plain = train_linear_svm(X, y, C=1.0)
        weighted = train_linear_svm(X, y, C=1.0, weights=balanced_weights(y))
        assert weighted.predict(X)[y == 1].mean() > plain.predict(X)[y == 1].mean()
        assert uar(confusion(y, weighted.predict(X))) > uar(confusion(y, plain.predict(X)))

    def test_zero_score_is_class_zero(self):
        model = LinearSvm(np.array([1.0]), 0.0)
        assert model.predict(np.array([[0.0], [1e-9]])).tolist() == [0, 1]

    def test_dict_round_trip(self):
        model = train_linear_svm(np.array([[0.0], [1.0]]), np.array([0, 1]), epochs=5)
        again = LinearSvm.from_dict(model.to_dict())
        assert np.array_equal(again.w, model.w) and again.b == model.b

    @pytest.mark.parametrize(
        "X, y, C",
        [
            (np.array([[np.nan], [1.0]]), np.array([0, 1]), 1.0),
            (np.array([[0.0], [1.0]]), np.array([0, 1, 1]), 1.0),
            (np.array([[0.0], [1.0]]), np.array([0, 1]), 0.0),
        ],
    )
    def test_invalid_input(self, X, y, C):
        with pytest.raises(ValidationError):
            train_linear_svm(X, y, C=C)

    def test_batch_size_must_be_positive(self):
        with pytest.raises(ValidationError, match="batch_size"):
            train_linear_svm(np.array([[0.0], [1.0]]), np.array([0, 1]), batch_size=0)


def test_balanced_weights_gain_on_held_out_draws():
    gains = []
    for seed in range(10):
        X, y = _imbalanced(seed)
        X_test, y_test = _imbalanced(seed + 100)
        plain = train_linear_svm(X, y, seed=seed)
        weighted = train_linear_svm(X, y, weights=balanced_weights(y), seed=seed)
        gains.append(
            uar(confusion(y_test, weighted.predict(X_test))) - uar(confusion(y_test, plain.predict(X_test)))
        )
    assert np.mean(gains) > 0.05
