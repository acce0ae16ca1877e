"""Morris elementary-effects screening: mu, mu*, sigma and the combined
derivative global sensitivity measure sqrt(mu*^2 + sigma^2).

Elementary effects are computed in unit-cube coordinates, matching the common
screening convention, so parameters with very different physical ranges stay
comparable; the ranges act only through the mapped simulator input.
"""

import logging
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .data import MorrisOatKind
from .errors import NoDataError
from .results import Measure, SensitivityResult
from .validation import check_is_fitted, column_and_mask, require_kind

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ElementaryEffects:
    """Per-parameter elementary-effect samples and their summaries."""

    per_param: list            # K lists, one EE per retained trajectory
    mu: np.ndarray
    mu_star: np.ndarray
    sigma: np.ndarray
    dgsm: np.ndarray
    n_trajectories: int        # retained (fully valid) trajectories


def elementary_effects(design, outputs, column=0):
    """Compute elementary effects from an OAT design and its outputs.

    A trajectory with any masked row is dropped whole: a partial trajectory
    would bias mu* because each parameter appears exactly once per trajectory.
    sigma uses the sample (n-1) standard deviation.
    """
    require_kind(design, MorrisOatKind, "elementary_effects")
    y, valid = column_and_mask(design, outputs, column)
    kind = design.kind
    k = design.k
    per_param = [[] for _ in range(k)]
    dropped = 0
    for t in range(kind.r):
        idx = np.nonzero(kind.trajectory == t)[0]
        if not valid[idx].all():
            dropped += 1
            continue
        for i in idx[1:]:
            j = kind.step_param[i]
            per_param[j].append((y[i] - y[i - 1]) / kind.step_delta[i])
    kept = kind.r - dropped
    if dropped:
        log.warning("dropped %d of %d trajectories containing masked rows",
                    dropped, kind.r)
    if kept == 0:
        raise NoDataError("no fully valid Morris trajectory remains")
    ee = np.array(per_param, dtype=float)
    mu = ee.mean(axis=1)
    mu_star = np.abs(ee).mean(axis=1)
    sigma = ee.std(axis=1, ddof=1) if kept > 1 else np.zeros(k)
    dgsm = np.sqrt(mu_star**2 + sigma**2)
    return ElementaryEffects(per_param=[list(v) for v in ee], mu=mu,
                             mu_star=mu_star, sigma=sigma, dgsm=dgsm,
                             n_trajectories=kept)


class MorrisAnalyzer(BaseEstimator):
    """Estimator-style wrapper producing the DGSM sensitivity result.

    Parameters
    ----------
    column : int or str
        Output column to analyze.
    """

    def __init__(self, column=0):
        self.column = column

    def fit(self, design, outputs):
        ee = elementary_effects(design, outputs, column=self.column)
        self.effects_ = ee
        self.mu_ = ee.mu
        self.mu_star_ = ee.mu_star
        self.sigma_ = ee.sigma
        self.dgsm_ = ee.dgsm
        self.result_ = SensitivityResult.from_raw(
            Measure.MORRIS_DGSM, design.space.names, ee.dgsm,
            extra={"mu": ee.mu, "mu_star": ee.mu_star, "sigma": ee.sigma,
                   "n_trajectories": ee.n_trajectories})
        return self

    def results(self):
        check_is_fitted(self)
        return {Measure.MORRIS_DGSM: self.result_}

    def scatter_table(self):
        """(name, mu_star, sigma) rows backing the sigma-vs-mu* scatterplot."""
        check_is_fitted(self)
        return [(name, float(ms), float(sg)) for name, ms, sg in
                zip(self.result_.names, self.mu_star_, self.sigma_)]
