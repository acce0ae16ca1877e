"""Elementary effects: exactness on linear targets, interaction detection,
trajectory hygiene."""

import numpy as np
import pytest

from sensa.data import OutputMatrix
from sensa.errors import NoDataError
from sensa.morris import MorrisAnalyzer, elementary_effects
from sensa.sampling import MorrisDesignConfig, morris_oat
from sensa.space import ParameterSpace


def brute_force_effects(design, y):
    """Independent EE computation: diff consecutive rows, find the changed
    coordinate from the unit matrix itself (ignoring the kind metadata)."""
    kind = design.kind
    per_param = [[] for _ in range(design.k)]
    for t in range(kind.r):
        idx = np.nonzero(kind.trajectory == t)[0]
        for i in idx[1:]:
            diff = design.unit[i] - design.unit[i - 1]
            (j,) = np.nonzero(diff)[0]
            per_param[j].append((y[i] - y[i - 1]) / diff[j])
    return per_param


class TestElementaryEffects:
    def test_linear_function_is_exact(self):
        space = ParameterSpace.unit(2)
        d = morris_oat(space, MorrisDesignConfig(r=12, levels=8), seed=1)
        y = 2.0 * d.unit[:, 0]
        ee = elementary_effects(d, y)
        assert np.allclose(ee.mu_star, [2.0, 0.0], atol=1e-10)
        assert np.allclose(ee.mu, [2.0, 0.0], atol=1e-10)
        assert np.allclose(ee.sigma, [0.0, 0.0], atol=1e-10)

    def test_dgsm_three_four_five(self):
        # mu* = 3, sigma = 4 must combine to 5
        assert np.hypot(3.0, 4.0) == pytest.approx(5.0)
        space = ParameterSpace.unit(1)
        d = morris_oat(space, MorrisDesignConfig(r=30, levels=8), seed=2)
        y = np.sin(7.0 * d.unit[:, 0])
        ee = elementary_effects(d, y)
        assert ee.dgsm[0] == pytest.approx(np.hypot(ee.mu_star[0], ee.sigma[0]))

    def test_interaction_gives_positive_sigma(self):
        space = ParameterSpace.unit(2)
        d = morris_oat(space, MorrisDesignConfig(r=20, levels=4), seed=3)
        y = d.unit[:, 0] * d.unit[:, 1]
        ee = elementary_effects(d, y)
        # EE of x1 equals the local x2 value, which varies across trajectories
        assert ee.sigma[0] > 0.05
        brute = brute_force_effects(d, y)
        for j in range(2):
            assert np.allclose(sorted(ee.per_param[j]), sorted(brute[j]), atol=1e-12)

    def test_additive_function_sigma_zero(self):
        space = ParameterSpace.unit(3)
        d = morris_oat(space, MorrisDesignConfig(r=15, levels=10), seed=4)
        y = 1.5 * d.unit[:, 0] - 0.5 * d.unit[:, 1] + 3.0 * d.unit[:, 2]
        ee = elementary_effects(d, y)
        assert np.all(ee.sigma < 1e-10)

    def test_sign_flip_moves_mu_not_mu_star(self):
        space = ParameterSpace.unit(2)
        d = morris_oat(space, MorrisDesignConfig(r=25, levels=6), seed=5)
        y = 2.0 * d.unit[:, 0] + 0.3 * d.unit[:, 1]
        ee_pos = elementary_effects(d, y)
        ee_neg = elementary_effects(d, -y)
        assert np.allclose(ee_neg.mu, -ee_pos.mu, atol=1e-12)
        assert np.allclose(ee_neg.mu_star, ee_pos.mu_star, atol=1e-12)

    def test_dgsm_dominates_components(self):
        space = ParameterSpace.unit(3)
        d = morris_oat(space, MorrisDesignConfig(r=20, levels=8), seed=6)
        y = np.sin(2 * np.pi * d.unit[:, 0]) + d.unit[:, 1] * d.unit[:, 2]
        ee = elementary_effects(d, y)
        assert np.all(ee.dgsm >= ee.mu_star - 1e-12)
        assert np.all(ee.dgsm >= ee.sigma - 1e-12)
        assert np.all(ee.mu_star >= np.abs(ee.mu) - 1e-12)

    def test_masked_row_drops_whole_trajectory(self):
        space = ParameterSpace.unit(2)
        d = morris_oat(space, MorrisDesignConfig(r=5, levels=4), seed=7)
        y = d.unit[:, 0].copy()
        values = y[:, None].copy()
        values[4, 0] = np.nan        # lands inside the second trajectory
        out = OutputMatrix(values, ("y",))
        ee = elementary_effects(d, out)
        assert ee.n_trajectories == 4
        assert all(len(v) == 4 for v in ee.per_param)

    def test_all_masked_raises(self):
        space = ParameterSpace.unit(2)
        d = morris_oat(space, MorrisDesignConfig(r=3, levels=4), seed=8)
        values = np.full((d.n, 1), np.nan)
        with pytest.raises(NoDataError):
            elementary_effects(d, OutputMatrix(values, ("y",)))


class TestMorrisAnalyzer:
    def test_fit_produces_scaled_result(self):
        space = ParameterSpace.unit(2)
        d = morris_oat(space, MorrisDesignConfig(r=10, levels=8), seed=9)
        y = 3.0 * d.unit[:, 0] + d.unit[:, 1]
        an = MorrisAnalyzer().fit(d, y)
        assert an.result_.scaled[0] == pytest.approx(0.75, abs=1e-9)
        assert len(an.scatter_table()) == 2
        assert an.get_params()["column"] == 0
