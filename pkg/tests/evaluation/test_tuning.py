import numpy as np
import pytest

from domain.config_models import PipelineConfig
from errors import DomainError
from evaluation.tuning import expand_grid, inner_tune


class TestExpandGrid:
    def test_default_grid_sizes(self):
        config = PipelineConfig()
        assert [cell["C"] for cell in expand_grid("linear_svm", config)] == [0.01, 0.1, 1.0, 10.0]
        forest = expand_grid("random_forest", config)
        assert [(c["n_trees"], c["max_depth"]) for c in forest] == [(100, None), (100, 10), (300, None), (300, 10)]
        assert len(expand_grid("rbf_svm", config)) == 8

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            expand_grid("boosting", PipelineConfig())


def _separable(n_couples=6, per_couple=6, seed=0):
    rng = np.random.default_rng(seed)
    couples = np.repeat(np.arange(1, n_couples + 1), per_couple)
    y = np.tile(np.arange(per_couple) % 2, n_couples)
    X = np.column_stack([y * 4.0 + rng.normal(0, 0.3, y.shape[0]), rng.normal(0, 1, y.shape[0])])
    return X, y, couples


class TestInnerTune:
    def test_single_cell_skips_search(self):
        X, y, couples = _separable()
        best, scores = inner_tune(X, y, couples, "linear_svm", [{"C": 3.0}])
        assert best == {"C": 3.0}
        assert scores == []

    def test_picks_cell_that_learns(self):
        X, y, couples = _separable()
        grid = [
            {"n_trees": 3, "max_depth": 0, "min_leaf": 1},
            {"n_trees": 3, "max_depth": None, "min_leaf": 1},
        ]
        best, scores = inner_tune(X, y, couples, "random_forest", grid, seed=1)
        assert best == grid[1]
        assert scores[0] == pytest.approx(0.5)
        assert scores[1] > scores[0]

    def test_infeasible_inner_split_falls_back_to_first_cell(self):
        X, y, _ = _separable()
        best, scores = inner_tune(X, y, np.ones(y.shape[0], dtype=int), "linear_svm", [{"C": 0.1}, {"C": 1.0}])
        assert best == {"C": 0.1}
        assert scores == []

    def test_empty_grid(self):
        X, y, couples = _separable()
        with pytest.raises(DomainError):
            inner_tune(X, y, couples, "linear_svm", [])
