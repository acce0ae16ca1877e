"""Directional variogram, VARS-TO, and integrated variogram oracles."""

import numpy as np
import pytest
from scipy.stats import spearmanr

from sensa.data import OutputMatrix
from sensa.errors import ConfigError, DegenerateOutputError
from sensa.sampling import SobolBlockConfig, VarsStarConfig, sobol_blocks, vars_stars
from sensa.sobol import sobol_indices
from sensa.space import ParameterSpace
from sensa.variogram import VarsAnalyzer, directional_variogram, ivars, vars_to


def brute_force_gamma(design, y, dim, lag_steps):
    """Independent pair enumeration straight off the row coordinates."""
    kind = design.kind
    g = int(round(1.0 / kind.h))
    total, count = 0.0, 0
    for s in range(kind.centers):
        in_star = kind.star == s
        on_section = in_star & ((kind.dim == dim) | (kind.dim == -1))
        idx = np.nonzero(on_section)[0]
        pos = np.rint(design.unit[idx, dim] * g).astype(int)
        order = np.argsort(pos)
        idx, pos = idx[order], pos[order]
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                if pos[b] - pos[a] == lag_steps:
                    total += 0.5 * (y[idx[a]] - y[idx[b]]) ** 2
                    count += 1
    return total / count


class TestDirectionalVariogram:
    def test_constant_function_zero_everywhere(self):
        space = ParameterSpace.unit(2)
        d = vars_stars(space, VarsStarConfig(centers=5, h=0.25), seed=1)
        for lag in (0.25, 0.5):
            assert np.allclose(directional_variogram(d, np.ones(d.n), lag=lag), 0.0)

    def test_linear_exact_algebra(self):
        # f = x1 on the grid: gamma_1(h) = h^2/2 exactly, gamma_2 = 0
        space = ParameterSpace.unit(2)
        d = vars_stars(space, VarsStarConfig(centers=12, h=0.1), seed=2)
        gamma = directional_variogram(d, d.unit[:, 0], lag=0.1)
        assert gamma[0] == pytest.approx(0.1**2 / 2.0, abs=1e-15)
        assert gamma[1] == pytest.approx(0.0, abs=1e-15)

    def test_sine_matches_brute_force_enumeration(self):
        space = ParameterSpace.unit(2)
        d = vars_stars(space, VarsStarConfig(centers=8, h=0.1), seed=3)
        y = np.sin(2 * np.pi * d.unit[:, 0])
        for steps in (1, 3):
            gamma = directional_variogram(d, y, lag=0.1 * steps)
            assert gamma[0] == pytest.approx(brute_force_gamma(d, y, 0, steps))
            assert gamma[1] == pytest.approx(brute_force_gamma(d, y, 1, steps))

    def test_additive_function_per_star_estimates_agree(self):
        # for additive f the section profile along dim k is the same in every
        # star, so the per-star gamma estimates coincide exactly
        space = ParameterSpace.unit(2)
        d = vars_stars(space, VarsStarConfig(centers=10, h=0.1), seed=20)
        y = 2.0 * d.unit[:, 0] + np.sin(2 * np.pi * d.unit[:, 1])
        kind = d.kind
        per_star = []
        for s in range(kind.centers):
            on = (kind.star == s) & ((kind.dim == 0) | (kind.dim == -1))
            idx = np.nonzero(on)[0]
            pos = np.rint(d.unit[idx, 0] * 10).astype(int)
            order = np.argsort(pos)
            vals = y[idx][order]
            per_star.append(0.5 * np.mean(np.diff(vals) ** 2))
        assert np.ptp(per_star) < 1e-12

    def test_off_grid_lag_rejected(self):
        space = ParameterSpace.unit(1)
        d = vars_stars(space, VarsStarConfig(centers=2, h=0.1), seed=4)
        with pytest.raises(ConfigError):
            directional_variogram(d, np.ones(d.n), lag=0.15)

    def test_masked_rows_drop_only_their_pairs(self):
        space = ParameterSpace.unit(1)
        d = vars_stars(space, VarsStarConfig(centers=3, h=0.25), seed=5)
        y = d.unit[:, 0]
        values = y[:, None].copy()
        kill = np.nonzero(d.kind.dim == 0)[0][0]
        values[kill, 0] = np.nan
        gamma = directional_variogram(d, OutputMatrix(values, ("y",)), lag=0.25)
        assert gamma[0] == pytest.approx(0.25**2 / 2.0, abs=1e-15)


class TestVarsTo:
    def test_single_active_parameter(self):
        space = ParameterSpace.unit(2)
        d = vars_stars(space, VarsStarConfig(centers=40, h=0.1), seed=6)
        vt = vars_to(d, d.unit[:, 0])
        scaled = vt / vt.sum()
        assert scaled[0] == pytest.approx(1.0, abs=1e-9)
        assert vt[0] == pytest.approx(1.0, abs=0.1)

    def test_constant_output_degenerate(self):
        space = ParameterSpace.unit(2)
        d = vars_stars(space, VarsStarConfig(centers=4, h=0.25), seed=7)
        with pytest.raises(DegenerateOutputError):
            vars_to(d, np.ones(d.n))

    def test_rank_agreement_with_jansen_total(self):
        def ishigami(u):
            z = np.pi * (2 * u - 1)
            return np.sin(z[:, 0]) + 7 * np.sin(z[:, 1]) ** 2 + 0.1 * z[:, 2] ** 4 * np.sin(z[:, 0])

        space = ParameterSpace.unit(3)
        dv = vars_stars(space, VarsStarConfig(centers=100, h=0.1), seed=8)
        vt = vars_to(dv, ishigami(dv.unit))
        ds = sobol_blocks(space, SobolBlockConfig(base_n=1024, rule="qmc"), seed=9)
        ind = sobol_indices(ds, ishigami(ds.unit), boot_reps=0, with_dummy=False)
        assert np.argmax(vt) == np.argmax(ind.t)
        assert spearmanr(vt, ind.t).statistic >= 0.9


class TestIvars:
    def test_constant_zero(self):
        space = ParameterSpace.unit(2)
        d = vars_stars(space, VarsStarConfig(centers=4, h=0.1), seed=10)
        assert np.allclose(ivars(d, np.ones(d.n), p=0.3), 0.0)

    def test_linear_closed_form_integral(self):
        # gamma(h) = h^2/2 integrates to p^3/6; trapezoid error is O(p h^2)
        space = ParameterSpace.unit(2)
        d = vars_stars(space, VarsStarConfig(centers=15, h=0.1), seed=11)
        y = d.unit[:, 0]
        for p in (0.1, 0.3, 0.5):
            val = ivars(d, y, p=p)
            assert val[0] == pytest.approx(p**3 / 6.0, abs=1e-3)
            assert val[1] == pytest.approx(0.0, abs=1e-15)

    def test_monotone_in_p(self):
        space = ParameterSpace.unit(2)
        d = vars_stars(space, VarsStarConfig(centers=10, h=0.1), seed=12)
        y = np.sin(2 * np.pi * d.unit[:, 0]) + d.unit[:, 1]
        vals = [ivars(d, y, p=p) for p in (0.1, 0.3, 0.5)]
        assert np.all(vals[0] <= vals[1] + 1e-12)
        assert np.all(vals[1] <= vals[2] + 1e-12)

    def test_off_grid_p_rejected(self):
        space = ParameterSpace.unit(1)
        d = vars_stars(space, VarsStarConfig(centers=3, h=0.1), seed=13)
        with pytest.raises(ConfigError):
            ivars(d, np.ones(d.n), p=0.25)


class TestVarsAnalyzer:
    def test_fit_reports_ivars_set(self):
        space = ParameterSpace.unit(2)
        d = vars_stars(space, VarsStarConfig(centers=20, h=0.1), seed=14)
        an = VarsAnalyzer().fit(d, d.unit[:, 0] + 0.2 * d.unit[:, 1])
        assert set(an.vars_.ivars) == {0.1, 0.3, 0.5}
        assert an.result_.scaled.sum() == pytest.approx(1.0)
        assert np.argmax(an.result_.scaled) == 0
