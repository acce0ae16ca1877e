"""The four regression-based methods: OLS/SRC, CART, random forest, GPR."""

import numpy as np
import pytest

from sensa.errors import InsufficientDataError, SingularFitError
from sensa.regress import (GprAnalyzer, RandomForestAnalyzer,
                           RegressionTreeAnalyzer, SrcRegression, fit_gpr,
                           fit_random_forest, fit_regression_tree, ols_src)
from sensa.regress.forest import forest_predict
from sensa.regress.gpr import profile_loglik
from sensa.sampling import LhsConfig, lhs_maximin
from sensa.space import ParameterDef, ParameterSpace


def lhs_design(k, n, seed):
    return lhs_maximin(ParameterSpace.unit(k), LhsConfig(n=n, seed=seed))


class TestOls:
    def test_three_point_exact_line(self):
        # (0,1), (1,3), (2,5): intercept 1, slope 2, zero residuals
        space = ParameterSpace([ParameterDef("x", 0.0, 2.0)])
        from sensa.data import DesignMatrix, LhsKind
        design = DesignMatrix(space, np.array([[0.0], [0.5], [1.0]]),
                              LhsKind(n=3), seed=0)
        fit = ols_src(design, np.array([1.0, 3.0, 5.0]))
        assert fit.beta == pytest.approx([1.0, 2.0], abs=1e-12)
        assert fit.r2 == pytest.approx(1.0)

    def test_inert_parameter_ranks_last(self):
        d = lhs_design(2, 200, 1)
        y = np.sin(3.0 * d.unit[:, 0])
        fit = ols_src(d, y)
        assert fit.t_abs[0] > 10 * fit.t_abs[1]

    def test_residual_orthogonality(self):
        d = lhs_design(3, 150, 2)
        y = 2 * d.unit[:, 0] - d.unit[:, 1] + np.sin(d.unit[:, 2])
        fit = ols_src(d, y)
        x = np.column_stack([np.ones(150), d.mapped])
        resid = y - x @ fit.beta
        scale = np.abs(x).max() * np.abs(y).max()
        assert np.all(np.abs(x.T @ resid) <= 1e-8 * max(scale, 1.0))

    def test_low_fit_flag(self):
        d = lhs_design(2, 300, 3)
        y = np.sin(6 * np.pi * d.unit[:, 0])
        fit = ols_src(d, y)
        assert fit.r2 < 0.7
        assert fit.low_fit

    def test_quadratic_improves_reported_r2_only(self):
        d = lhs_design(2, 300, 4)
        y = (d.unit[:, 0] - 0.5) ** 2
        plain = ols_src(d, y)
        quad = ols_src(d, y, quadratic=True)
        assert quad.r2_quadratic > plain.r2
        assert np.allclose(quad.t_abs, plain.t_abs)

    def test_insufficient_data(self):
        d = lhs_design(3, 4, 5)
        with pytest.raises(InsufficientDataError):
            ols_src(d, np.ones(4))

    def test_rank_deficient(self):
        space = ParameterSpace.unit(2)
        from sensa.data import DesignMatrix, LhsKind
        unit = np.tile([[0.25, 0.25]], (10, 1))    # identical rows
        design = DesignMatrix(space, unit, LhsKind(n=10), seed=0)
        with pytest.raises(SingularFitError):
            ols_src(design, np.arange(10.0))


class TestRegressionTree:
    def test_single_split_target(self):
        d = lhs_design(2, 400, 6)
        y = (d.unit[:, 0] > 0.5).astype(float)
        an = RegressionTreeAnalyzer(min_node_size=20).fit(d, y)
        tree = an.tree_
        assert tree.feature[0] == 0
        assert tree.threshold[0] == pytest.approx(0.5, abs=0.05)
        assert an.result_.scaled[0] == pytest.approx(1.0)

    def test_constant_target_single_leaf(self):
        d = lhs_design(2, 100, 7)
        an = RegressionTreeAnalyzer().fit(d, np.full(100, 3.25))
        assert an.tree_.n_leaves == 1
        assert an.tree_.value[0] == pytest.approx(3.25)
        assert np.all(an.importance_ == 0)
        assert an.results() == {}

    def test_symmetric_importance_split(self):
        d = lhs_design(2, 1000, 8)
        y = d.unit[:, 0] + d.unit[:, 1]
        an = RegressionTreeAnalyzer().fit(d, y)
        share = an.result_.scaled
        assert 0.35 <= share[0] <= 0.65
        assert 0.35 <= share[1] <= 0.65

    def test_leaf_value_is_member_mean(self):
        d = lhs_design(2, 300, 9)
        y = np.sin(4 * d.unit[:, 0]) + d.unit[:, 1] ** 2
        tree = fit_regression_tree(d, y, min_node_size=25)
        leaves = tree.apply(d.mapped)
        for leaf in np.unique(leaves):
            members = y[leaves == leaf]
            assert tree.value[leaf] == pytest.approx(members.mean(), abs=1e-12)
            assert tree.n_samples[leaf] == members.size
        assert tree.n_samples[tree.feature == -1].sum() == 300

    def test_sse_never_increases_down_a_split(self):
        d = lhs_design(3, 500, 10)
        y = d.unit[:, 0] * d.unit[:, 1] + 0.3 * d.unit[:, 2]
        tree = fit_regression_tree(d, y, min_node_size=20)
        assert np.all(tree.improvement[tree.feature >= 0] > 0)

    def test_predict_matches_training_assignments(self):
        d = lhs_design(2, 200, 11)
        y = d.unit[:, 0] ** 2
        tree = fit_regression_tree(d, y, min_node_size=15)
        assert np.array_equal(tree.predict(d.mapped), tree.fitted)
        assert len(tree.leaf_table()) == 200


class TestRandomForest:
    def test_inert_parameter_small_importance(self):
        d = lhs_design(3, 400, 12)
        y = 3 * d.unit[:, 0] + d.unit[:, 1]
        fit = fit_random_forest(d, y, b=80, seed=0)
        perm = fit.oob_perm_importance
        assert abs(perm[2]) <= 0.05 * perm.max()

    def test_ranking_follows_effect_size(self):
        d = lhs_design(2, 500, 13)
        y = 3 * d.unit[:, 0] + d.unit[:, 1]
        fit = fit_random_forest(d, y, b=80, seed=1)
        assert fit.oob_perm_importance[0] > fit.oob_perm_importance[1]
        assert fit.impurity_importance[0] > fit.impurity_importance[1]

    def test_forest_beats_single_tree(self):
        # B=500 vs B=1 out-of-sample MSE, at least 9 wins out of 10 seeds
        wins = 0
        for seed in range(10):
            train = lhs_design(2, 300, 100 + seed)
            test = lhs_design(2, 300, 200 + seed)
            f = lambda u: np.sin(2 * np.pi * u[:, 0]) + u[:, 1] ** 2
            y_tr, y_te = f(train.unit), f(test.unit)
            big = fit_random_forest(train, y_tr, b=500, seed=seed)
            one = fit_random_forest(train, y_tr, b=1, seed=seed)
            mse_big = ((forest_predict(big, test.mapped) - y_te) ** 2).mean()
            mse_one = ((forest_predict(one, test.mapped) - y_te) ** 2).mean()
            wins += mse_big < mse_one
        assert wins >= 9

    def test_oob_r2_reasonable(self):
        d = lhs_design(2, 400, 14)
        y = d.unit[:, 0] + 0.5 * d.unit[:, 1]
        an = RandomForestAnalyzer(b=100, seed=2).fit(d, y)
        assert an.oob_r2_ > 0.8
        assert set(an.results()) == {"forest_permutation", "forest_impurity"}


class TestGpr:
    def test_noise_free_linear_trend_recovery(self):
        d = lhs_design(4, 350, 15)
        coef = np.array([2.0, -1.5, 0.7, 0.1])
        y = d.unit @ coef + 5.0
        fit = fit_gpr(d, y, max_n=300, seed=3, restarts=4)
        assert fit.trend_beta == pytest.approx([5.0, *coef], abs=1e-3)

    def test_inert_parameter_smallest_inv_range(self):
        d = lhs_design(3, 250, 16)
        y = np.sin(2 * np.pi * d.unit[:, 0]) * d.unit[:, 1]
        fit = fit_gpr(d, y, max_n=160, seed=4, restarts=4)
        assert np.argmin(fit.inv_range_norm) == 2
        assert fit.inv_range_norm.sum() == pytest.approx(1.0, abs=1e-12)

    def test_subsample_respected(self):
        d = lhs_design(2, 400, 17)
        y = d.unit[:, 0]
        fit = fit_gpr(d, y, max_n=120, seed=5, restarts=2)
        assert fit.n_used == 120
        assert fit.subsample_idx.size == 120

    def test_likelihood_at_optimum_beats_random_starts(self):
        d = lhs_design(2, 150, 18)
        y = np.sin(3 * d.unit[:, 0]) + 0.5 * d.unit[:, 1]
        fit = fit_gpr(d, y, max_n=150, seed=6, restarts=4)
        rng = np.random.default_rng(0)
        for _ in range(32):
            lg = rng.uniform(-7, 14, size=2)
            ll = profile_loglik(d, y, lg, max_n=150, seed=6)
            assert fit.log_lik >= ll - 1e-6

    def test_correlation_matrix_pd_after_jitter(self):
        d = lhs_design(2, 200, 19)
        y = d.unit[:, 0] ** 2
        fit = fit_gpr(d, y, max_n=200, seed=7, restarts=2)
        u = d.unit[fit.subsample_idx]
        pd_mat = np.abs(u[:, None, :] - u[None, :, :]) ** fit.alpha_exp
        r = np.exp(-(pd_mat / fit.ranges).sum(axis=2)) + 1e-4 * np.eye(200)
        np.linalg.cholesky(r)
        assert np.allclose(r, r.T)

    def test_analyzer_results(self):
        d = lhs_design(2, 200, 20)
        y = 2 * d.unit[:, 0] + d.unit[:, 1] ** 3
        an = GprAnalyzer(max_n=120, seed=8, restarts=3).fit(d, y)
        out = an.results()
        assert set(out) == {"gpr_slope", "gpr_inv_range"}
        assert np.argmax(out["gpr_slope"].scaled) == 0


class TestCrossMethodSanity:
    def test_all_four_put_the_active_parameter_first(self):
        d = lhs_design(2, 400, 21)
        y = d.unit[:, 0].copy()
        src = SrcRegression().fit(d, y).result_
        tree = RegressionTreeAnalyzer().fit(d, y).result_
        forest = RandomForestAnalyzer(b=60, seed=9).fit(d, y).result_
        gpr = GprAnalyzer(max_n=150, seed=10, restarts=3).fit(d, y).result_
        for res in (src, tree, forest, gpr):
            assert np.argmax(res.scaled) == 0
            assert res.scaled[0] >= 0.9
