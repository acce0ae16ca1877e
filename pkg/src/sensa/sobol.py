"""Variance-based first-order and total sensitivities.

Estimator pair: Saltelli-2010 for S1 and Jansen-1994 for T, the defaults of
the R package this toolkit mirrors. Bootstrap confidence intervals resample
row tuples (the i-th row of every block jointly) with replacement and use the
percentile method. Dummy-parameter cutoffs estimate the Monte Carlo noise
floor from the (A, B) pair alone, so they cost no extra model runs.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .data import SobolBlocksKind
from .errors import ConfigError, DegenerateOutputError, NoDataError
from .results import Measure, SensitivityResult, result_or_none
from .validation import check_is_fitted, column_and_mask, require_kind


@dataclass(frozen=True, eq=False)
class SobolIndices:
    s1: np.ndarray
    t: np.ndarray
    v_y: float
    ci_s1: np.ndarray | None = None     # (K, 2) percentile bounds
    ci_t: np.ndarray | None = None
    dummy_s1: float | None = None       # upper 95% bootstrap noise cutoffs
    dummy_t: float | None = None
    boot_reps: int = 0
    n_tuples: int = 0


def _split_blocks(design, y, valid):
    kind = design.kind
    n, k = kind.base_n, design.k
    y = y.reshape(k + 2, n)
    valid = valid.reshape(k + 2, n)
    good = valid.all(axis=0)
    if not good.any():
        raise NoDataError("every Sobol' row tuple contains an invalid row")
    fa, fb = y[0, good], y[1, good]
    fab = y[2:, good]
    return fa, fb, fab, int(good.sum())


ESTIMATOR_PAIRS = ("saltelli-jansen", "sobol-homma")


def _estimate(fa, fb, fab, pair="saltelli-jansen"):
    """Point estimates from one set of (A, B, AB_k) output vectors.

    The default pair is Saltelli-2010 for S1 with Jansen-1994 for T; the
    older Sobol'-1993 / Homma-Saltelli-1996 pair sits behind the enum.
    """
    v_y = np.var(np.concatenate([fa, fb]), ddof=1)
    if v_y <= 0:
        raise DegenerateOutputError("output variance is zero; indices undefined")
    n = fa.size
    if pair == "saltelli-jansen":
        s1 = (fb * (fab - fa)).sum(axis=1) / n / v_y
        t = 0.5 * ((fa - fab) ** 2).sum(axis=1) / n / v_y
    elif pair == "sobol-homma":
        # B and AB_k share only column k (first-order); A and AB_k share
        # everything but k (complement variance, hence total)
        f0_sq = fa.mean() * fb.mean()
        s1 = ((fb * fab).sum(axis=1) / n - f0_sq) / v_y
        t = 1.0 - ((fa * fab).sum(axis=1) / n - f0_sq) / v_y
    else:
        raise ConfigError(f"unknown estimator pair {pair!r}; "
                          f"choose from {ESTIMATOR_PAIRS}")
    return s1, t, v_y


def _dummy_estimate(fa, fb):
    """Noise-floor S1/T for a parameter the model provably ignores.

    An inert extra column leaves the model output unchanged, so its indices
    can be estimated from the cross-statistics of the independent A and B
    blocks: Cov(f_A, f_B) plays the role of the S1 numerator and the mean
    squared A-B gap replaces the Jansen numerator.
    """
    v_y = np.var(np.concatenate([fa, fb]), ddof=1)
    if v_y <= 0:
        raise DegenerateOutputError("output variance is zero; indices undefined")
    n = fa.size
    s1 = ((fa - fa.mean()) * (fb - fb.mean())).sum() / (n - 1) / v_y
    t = 1.0 - 0.5 * ((fa - fb) ** 2).sum() / n / v_y
    return s1, t


def sobol_indices(design, outputs, column=0, boot_reps=1000, seed=0,
                  ci_level=0.95, with_dummy=True, estimators="saltelli-jansen"):
    """Estimate S1 and T with bootstrap CIs and dummy significance cutoffs.

    A tuple (A_i, B_i, AB_1..K,i) is used only if every one of its rows is
    valid; filtering one row therefore drops the whole tuple.
    """
    require_kind(design, SobolBlocksKind, "sobol_indices")
    y, valid = column_and_mask(design, outputs, column)
    fa, fb, fab, n_tuples = _split_blocks(design, y, valid)
    s1, t, v_y = _estimate(fa, fb, fab, estimators)
    ci_s1 = ci_t = None
    dummy_s1 = dummy_t = None
    if with_dummy:
        ds1, dt = _dummy_estimate(fa, fb)
        dummy_s1, dummy_t = max(0.0, ds1), max(0.0, dt)
    if boot_reps > 0:
        rng = np.random.default_rng(seed)
        lo_q, hi_q = 50 * (1 - ci_level), 50 * (1 + ci_level)
        bs_s1 = np.empty((boot_reps, design.k))
        bs_t = np.empty((boot_reps, design.k))
        bs_ds1 = np.empty(boot_reps)
        bs_dt = np.empty(boot_reps)
        for b in range(boot_reps):
            idx = rng.integers(n_tuples, size=n_tuples)
            bs_s1[b], bs_t[b], _ = _estimate(fa[idx], fb[idx], fab[:, idx],
                                             estimators)
            if with_dummy:
                bs_ds1[b], bs_dt[b] = _dummy_estimate(fa[idx], fb[idx])
        ci_s1 = np.percentile(bs_s1, [lo_q, hi_q], axis=0).T
        ci_t = np.percentile(bs_t, [lo_q, hi_q], axis=0).T
        if with_dummy:
            # one-sided upper bound: estimates below it look like pure noise;
            # floored at zero because true indices are nonnegative
            dummy_s1 = max(0.0, float(np.percentile(bs_ds1, 100 * ci_level)))
            dummy_t = max(0.0, float(np.percentile(bs_dt, 100 * ci_level)))
    return SobolIndices(s1=s1, t=t, v_y=v_y, ci_s1=ci_s1, ci_t=ci_t,
                        dummy_s1=dummy_s1, dummy_t=dummy_t,
                        boot_reps=boot_reps, n_tuples=n_tuples)


def _bracket(ci, raw):
    """Widen percentile bounds so they always bracket the reported value."""
    if ci is None:
        return None
    out = ci.copy()
    out[:, 0] = np.minimum(out[:, 0], raw)
    out[:, 1] = np.maximum(out[:, 1], raw)
    return out


def dummy_cutoffs(design, outputs, column=0, boot_reps=1000, seed=0,
                  ci_level=0.95):
    """Just the (dummy_s1, dummy_t) significance cutoffs."""
    ind = sobol_indices(design, outputs, column=column, boot_reps=boot_reps,
                        seed=seed, ci_level=ci_level, with_dummy=True)
    return ind.dummy_s1, ind.dummy_t


class SobolAnalyzer(BaseEstimator):
    """Estimator-style wrapper producing both S1 and T sensitivity results.

    Negative point estimates are kept raw (they flag Monte Carlo noise) and
    clipped at zero only for the sum-to-one scaled output. ``interaction_flag_``
    marks parameters whose T - S1 gap exceeds ``interaction_threshold``.
    """

    def __init__(self, column=0, boot_reps=1000, seed=0, ci_level=0.95,
                 with_dummy=True, interaction_threshold=0.1,
                 estimators="saltelli-jansen"):
        self.column = column
        self.boot_reps = boot_reps
        self.seed = seed
        self.ci_level = ci_level
        self.with_dummy = with_dummy
        self.interaction_threshold = interaction_threshold
        self.estimators = estimators

    def fit(self, design, outputs):
        ind = sobol_indices(design, outputs, column=self.column,
                            boot_reps=self.boot_reps, seed=self.seed,
                            ci_level=self.ci_level, with_dummy=self.with_dummy,
                            estimators=self.estimators)
        self.indices_ = ind
        self.s1_, self.t_, self.v_y_ = ind.s1, ind.t, ind.v_y
        self.interaction_flag_ = (ind.t - ind.s1) > self.interaction_threshold
        names = design.space.names
        extra = {"v_y": ind.v_y, "n_tuples": ind.n_tuples,
                 "dummy_s1": ind.dummy_s1, "dummy_t": ind.dummy_t,
                 "interaction_flag": self.interaction_flag_}
        raw_s1 = np.clip(ind.s1, 0, None)
        raw_t = np.clip(ind.t, 0, None)
        self.result_s1_ = result_or_none(
            Measure.SOBOL_S1, names, raw_s1,
            ci=_bracket(ind.ci_s1, raw_s1), extra=dict(extra, point=ind.s1))
        self.result_ = SensitivityResult.from_raw(
            Measure.SOBOL_T, names, raw_t,
            ci=_bracket(ind.ci_t, raw_t), extra=dict(extra, point=ind.t))
        return self

    def results(self):
        check_is_fitted(self)
        out = {Measure.SOBOL_T: self.result_}
        if self.result_s1_ is not None:
            out[Measure.SOBOL_S1] = self.result_s1_
        return out

    def below_noise_(self):
        """Parameters whose S1 and T both sit under the dummy cutoffs."""
        check_is_fitted(self)
        if self.indices_.dummy_t is None:
            raise ConfigError("dummy cutoffs were not computed (with_dummy=False)")
        return (self.s1_ <= self.indices_.dummy_s1) & (self.t_ <= self.indices_.dummy_t)

    def bar_table(self):
        """Rows (name, s1, t, s1_lo, s1_hi, t_lo, t_hi) for the paired bars."""
        check_is_fitted(self)
        ind = self.indices_
        ci_s1 = ind.ci_s1 if ind.ci_s1 is not None else np.full((len(self.s1_), 2), np.nan)
        ci_t = ind.ci_t if ind.ci_t is not None else np.full((len(self.t_), 2), np.nan)
        return [(n, float(s), float(t), float(cs[0]), float(cs[1]),
                 float(ct[0]), float(ct[1]))
                for n, s, t, cs, ct in zip(self.result_.names, self.s1_, self.t_,
                                           ci_s1, ci_t)]
