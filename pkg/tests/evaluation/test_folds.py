import numpy as np
import pytest

from errors import StratificationError
from evaluation.folds import assign_folds, make_couple_folds
from fixtures.synthetic_samples import make_samples


class TestAssignFolds:
    def test_six_balanced_couples_three_folds(self):
        couples = np.repeat(np.arange(1, 7), 4)
        labels = np.tile([0, 1, 0, 1], 6)
        plan = assign_folds(couples, labels, 3, "valence")
        assert [len(plan.couples_in(f)) for f in range(3)] == [2, 2, 2]
        assert plan.class_counts == ((4, 4), (4, 4), (4, 4))

    @pytest.mark.parametrize("seed", range(5))
    def test_couple_disjoint_and_every_fold_has_both_classes(self, seed):
        rng = np.random.default_rng(seed)
        couples = rng.integers(1, 14, 380)
        labels = (rng.random(380) < 0.2).astype(int)
        plan = assign_folds(couples, labels, 3, "arousal", seed=seed)
        assert all(a > 0 and b > 0 for a, b in plan.class_counts)
        seen = set()
        for train_idx, test_idx in plan.splits(couples):
            test_couples = set(couples[test_idx].tolist())
            assert test_couples.isdisjoint(couples[train_idx].tolist())
            assert test_couples.isdisjoint(seen)
            seen |= test_couples
        assert seen == set(couples.tolist())

    def test_skewed_couples_paired_toward_global_rate(self):
        # positives per couple of 10: 8, 8, 2, 2, 5, 5 -> global rate 0.5
        couples = np.repeat(np.arange(1, 7), 10)
        labels = np.concatenate([np.arange(10) < p for p in (8, 8, 2, 2, 5, 5)]).astype(int)
        plan = assign_folds(couples, labels, 3, "valence")
        assert plan.class_counts == ((10, 10), (10, 10), (10, 10))
        assert (5, 6) in {plan.couples_in(f) for f in range(3)}

    @pytest.mark.parametrize("seed", range(5))
    def test_fold_rates_track_global_rate(self, seed):
        rng = np.random.default_rng(100 + seed)
        couples = np.repeat(np.arange(1, 14), 30)
        couple_rate = rng.uniform(0.05, 0.45, 13)
        labels = (rng.random(couples.size) < couple_rate[couples - 1]).astype(int)
        plan = assign_folds(couples, labels, 3, "arousal", seed=seed)
        global_rate = labels.mean()
        for neg, pos in plan.class_counts:
            assert abs(pos / (neg + pos) - global_rate) < 0.1
        assert sorted(len(plan.couples_in(f)) for f in range(3)) == [4, 4, 5]

    def test_same_seed_same_plan(self):
        samples = make_samples(n_couples=9)
        a = make_couple_folds(samples, 3, "valence", seed=4)
        b = make_couple_folds(samples, 3, "valence", seed=4)
        assert a.assignment == b.assignment

    def test_too_few_couples(self):
        with pytest.raises(StratificationError) as exc:
            assign_folds([1, 1, 2, 2], [0, 1, 0, 1], 3, "valence")
        assert exc.value.target == "valence"

    def test_too_few_minority_samples(self):
        with pytest.raises(StratificationError, match="minority"):
            assign_folds([1, 2, 3, 4], [0, 0, 1, 1], 3, "arousal")

    def test_minority_held_by_one_couple_is_infeasible(self):
        couples = [1, 1, 1, 1, 2, 2, 3, 3, 4, 4]
        labels = [1, 1, 1, 0, 0, 0, 0, 0, 0, 0]
        with pytest.raises(StratificationError) as exc:
            assign_folds(couples, labels, 3, "valence")
        assert exc.value.target == "valence"
