import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catscreen import (
    CategoricalDesign,
    DegenerateResponseError,
    Method,
    ResponseVector,
    ScreenerConfig,
    ValidationError,
    cat_sis,
    cat_sis_numerator_cellform,
    dc_sis,
    empirical_cells,
    hlw_sis,
    mmle,
    screen,
)

from conftest import random_categorical


def pearson_oracle(x, y):
    """|plug-in correlation| with 1/n moments; independent of the screeners."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    tau = np.mean((x - x.mean()) * (y - y.mean()))
    sx = np.sqrt(np.mean((x - x.mean()) ** 2))
    sy = np.sqrt(np.mean((y - y.mean()) ** 2))
    if sx == 0 or sy == 0:
        return 0.0
    return abs(tau) / (sx * sy)


def brute_dcor2(x, y):
    """Squared distance correlation via explicit double centering."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = np.abs(x[:, None] - x[None, :])
    b = np.abs(y[:, None] - y[None, :])
    A = a - a.mean(0)[None, :] - a.mean(1)[:, None] + a.mean()
    B = b - b.mean(0)[None, :] - b.mean(1)[:, None] + b.mean()
    v2xy = (A * B).mean()
    v2xx = (A * A).mean()
    v2yy = (B * B).mean()
    if v2xx <= 0 or v2yy <= 0:
        return 0.0
    return max(v2xy, 0.0) / np.sqrt(v2xx * v2yy)


class TestCatSis:
    def test_perfect_agreement(self, tiny_perfect):
        design, y = tiny_perfect
        assert cat_sis(design, y).scores[0] == pytest.approx(1.0)

    def test_zero_covariance_by_symmetry(self):
        design = CategoricalDesign.from_levels(np.array([[0], [0], [1], [1]]))
        y = ResponseVector.binary([0, 1, 0, 1])
        assert cat_sis(design, y).scores[0] == pytest.approx(0.0)

    def test_hand_derived_three_level(self, tiny_three_level):
        design, y = tiny_three_level
        # tau = 0.375, sd_x = sqrt(0.6875), sd_y = 0.5
        expected = 0.375 / (np.sqrt(0.6875) * 0.5)
        assert cat_sis(design, y).scores[0] == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.9045, abs=5e-5)

    def test_constant_response_errors(self, tiny_perfect):
        design, _ = tiny_perfect
        y = ResponseVector.binary([1, 1, 1, 1])
        with pytest.raises(DegenerateResponseError):
            cat_sis(design, y)

    def test_zero_variance_feature_flagged(self):
        design = CategoricalDesign.from_levels(np.array([[0, 0], [0, 1], [0, 0], [0, 1]]))
        y = ResponseVector.binary([0, 1, 0, 1])
        res = cat_sis(design, y)
        assert res.scores[0] == 0.0
        assert res.degenerate.tolist() == [True, False]

    def test_continuous_mode_is_pearson(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=(40, 3))
        y = ResponseVector.continuous(x[:, 0] * 2.0 + rng.normal(size=40))
        res = cat_sis(x, y)
        for j in range(3):
            assert res.scores[j] == pytest.approx(pearson_oracle(x[:, j], y.values), abs=1e-12)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_matches_pearson_oracle(self, seed):
        rng = np.random.default_rng(seed)
        design, y = random_categorical(rng)
        res = cat_sis(design, y)
        xs = design.scored_matrix()
        for j in range(design.p):
            assert res.scores[j] == pytest.approx(
                pearson_oracle(xs[:, j], y.values), abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000),
           st.floats(min_value=0.05, max_value=20.0),
           st.booleans(),
           st.floats(min_value=-5.0, max_value=5.0))
    def test_affine_score_invariance(self, seed, a, negate, b):
        rng = np.random.default_rng(seed)
        design, y = random_categorical(rng)
        scale = -a if negate else a
        rescaled = CategoricalDesign.from_levels(
            design.levels,
            level_scores=[scale * design.level_scores[j, :k] + b
                          for j, k in enumerate(design.level_counts)])
        base = cat_sis(design, y)
        moved = cat_sis(rescaled, y)
        assert np.allclose(base.scores, moved.scores, atol=1e-12)
        assert np.array_equal(base.ranking, moved.ranking)

    def test_scores_bounded(self):
        rng = np.random.default_rng(11)
        design, y = random_categorical(rng, n=150, p=20)
        s = cat_sis(design, y).scores
        assert np.all(s >= 0.0) and np.all(s <= 1.0)


class TestNumeratorCellform:
    def test_uniform_table_is_zero(self):
        d = CategoricalDesign.from_levels(np.array([[0], [0], [1], [1]]))
        y = ResponseVector.binary([0, 1, 0, 1])
        assert cat_sis_numerator_cellform(empirical_cells(d, y, 0)) == pytest.approx(0.0)

    def test_hand_value(self, tiny_three_level):
        design, y = tiny_three_level
        assert cat_sis_numerator_cellform(
            empirical_cells(design, y, 0)) == pytest.approx(0.375, abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=0, max_value=100_000))
    def test_equals_observation_form(self, seed):
        rng = np.random.default_rng(seed)
        design, y = random_categorical(rng, n=50)
        xs = design.scored_matrix()
        for j in range(design.p):
            cell = cat_sis_numerator_cellform(empirical_cells(design, y, j))
            obs = np.mean((xs[:, j] - xs[:, j].mean()) * (y.values - y.values.mean()))
            assert cell == pytest.approx(obs, abs=1e-12)


class TestHlwSis:
    def test_independent_uniform_is_zero(self):
        d = CategoricalDesign.from_levels(np.array([[0], [0], [1], [1]]))
        y = ResponseVector.binary([0, 1, 0, 1])
        assert hlw_sis(d, y).scores[0] == pytest.approx(0.0)

    def test_perfect_association_is_one(self, tiny_perfect):
        design, y = tiny_perfect
        # chi-square equals n for a perfect 2x2 association
        x = design.levels[:, 0]
        table = np.array([[np.sum((x == k) & (y.values == m)) for m in (0, 1)]
                          for k in (0, 1)], dtype=float)
        n = table.sum()
        expected = table.sum(1)[:, None] * table.sum(0)[None, :] / n
        chi2 = ((table - expected) ** 2 / expected).sum()
        assert chi2 / n == pytest.approx(1.0)
        assert hlw_sis(design, y).scores[0] == pytest.approx(1.0, abs=1e-12)

    def test_score_free_statistic(self):
        rng = np.random.default_rng(3)
        design, y = random_categorical(rng, n=80, random_scores=False)
        permuted = CategoricalDesign.from_levels(
            design.levels,
            level_scores=[rng.permutation(np.arange(k, dtype=float)) + 3.0
                          for k in design.level_counts])
        assert np.allclose(hlw_sis(design, y).scores,
                           hlw_sis(permuted, y).scores, atol=1e-15)

    def test_empty_cells_contribute_zero(self, tiny_three_level):
        design, y = tiny_three_level
        s = hlw_sis(design, y).scores[0]
        assert np.isfinite(s) and s >= 0.0

    def test_constant_response_errors(self, tiny_perfect):
        design, _ = tiny_perfect
        with pytest.raises(DegenerateResponseError):
            hlw_sis(design, ResponseVector.binary([0, 0, 0, 0]))


class TestDcSis:
    def test_identical_is_one(self):
        x = np.arange(6.0).reshape(-1, 1)
        y = ResponseVector.continuous(np.arange(6.0))
        assert dc_sis(x, y).scores[0] == pytest.approx(1.0, abs=1e-12)

    def test_constant_feature_flagged(self):
        x = np.ones((6, 1))
        y = ResponseVector.continuous(np.arange(6.0))
        res = dc_sis(x, y)
        assert res.scores[0] == 0.0
        assert res.degenerate[0]

    def test_small_n_rejected(self):
        x = np.arange(3.0).reshape(-1, 1)
        with pytest.raises(ValidationError):
            dc_sis(x, ResponseVector.continuous(np.arange(3.0)))

    def test_numeric_against_brute_force(self):
        x = np.array([0.0, 1.0, 2.0, 3.0]).reshape(-1, 1)
        y = ResponseVector.continuous(np.array([0.0, 0.0, 1.0, 1.0]))
        assert dc_sis(x, y).scores[0] == pytest.approx(
            brute_dcor2(x[:, 0], y.values), abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_categorical_fast_path_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        design, y = random_categorical(rng, n=40)
        res = dc_sis(design, y)
        xs = design.scored_matrix()
        for j in range(design.p):
            assert res.scores[j] == pytest.approx(
                brute_dcor2(xs[:, j], y.values), abs=1e-12)

    def test_scores_bounded(self):
        rng = np.random.default_rng(12)
        design, y = random_categorical(rng, n=120, p=15)
        s = dc_sis(design, y).scores
        assert np.all(s >= 0.0) and np.all(s <= 1.0)


def newton_logistic_oracle(x, y):
    """Observation-level Newton fit of y ~ 1 + x; independent of the
    cell-collapsed implementation."""
    a, b = 0.0, 0.0
    for _ in range(200):
        eta = a + b * x
        p = 1.0 / (1.0 + np.exp(-eta))
        w = p * (1 - p)
        g = np.array([(y - p).sum(), (x * (y - p)).sum()])
        h = np.array([[w.sum(), (x * w).sum()], [(x * w).sum(), (x * x * w).sum()]])
        step = np.linalg.solve(h, g)
        a, b = a + step[0], b + step[1]
        if np.abs(step).max() < 1e-12:
            break
    return a, b


class TestMmle:
    def test_constant_feature_scores_zero(self):
        d = CategoricalDesign.from_levels(np.array([[0], [0], [0], [0]]),
                                          level_scores=[[1.5]])
        y = ResponseVector.binary([0, 1, 0, 1])
        res = mmle(d, y)
        assert res.scores[0] == 0.0
        assert res.degenerate[0]

    def test_exact_balance_scores_zero(self):
        d = CategoricalDesign.from_levels(np.array([[0], [0], [1], [1], [2], [2]]))
        y = ResponseVector.binary([0, 1, 0, 1, 0, 1])
        assert mmle(d, y).scores[0] == pytest.approx(0.0, abs=1e-8)

    def test_matches_newton_oracle(self):
        rng = np.random.default_rng(99)
        x = np.tile([0.0, 1.0, 2.0], 20)
        prob = 1.0 / (1.0 + np.exp(-(-1.0 + 1.5 * x)))
        y = (rng.random(60) < prob).astype(int)
        d = CategoricalDesign.from_levels(x.astype(int).reshape(-1, 1))
        res = mmle(d, ResponseVector.binary(y))
        _, b = newton_logistic_oracle(x, y.astype(float))
        assert res.scores[0] == pytest.approx(abs(b), abs=1e-6)

    def test_separated_feature_flagged(self):
        d = CategoricalDesign.from_levels(np.array([[0], [0], [0], [1], [1], [1]]))
        y = ResponseVector.binary([0, 0, 0, 1, 1, 1])
        res = mmle(d, y, ScreenerConfig(mmle_max_iter=40))
        assert res.degenerate[0]
        assert res.scores[0] > 10.0

    def test_constant_response_errors(self):
        d = CategoricalDesign.from_levels(np.array([[0], [1], [0], [1]]))
        with pytest.raises(DegenerateResponseError):
            mmle(d, ResponseVector.binary([1, 1, 1, 1]))

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            ScreenerConfig(mmle_max_iter=0)


class TestDispatch:
    def test_screen_routes_all_methods(self):
        rng = np.random.default_rng(8)
        design, y = random_categorical(rng, n=60)
        for m in Method:
            res = screen(design, y, m)
            assert res.method is m
            assert res.p == design.p

    def test_rerun_bitwise_stable(self):
        rng = np.random.default_rng(21)
        design, y = random_categorical(rng, n=100, p=8)
        for m in Method:
            a = screen(design, y, m)
            b = screen(design, y, m)
            assert a.scores.tobytes() == b.scores.tobytes()
            assert np.array_equal(a.ranking, b.ranking)
