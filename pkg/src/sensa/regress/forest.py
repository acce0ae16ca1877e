"""Random forest of CART trees with the two classic importance measures:
out-of-bag permutation MSE increase and average impurity (SSE) reduction.

Each tree draws its bootstrap rows, its per-node feature subsets, and its
permutation shuffles from an independently derived seed, so results do not
depend on any training order.
"""

import logging
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import InsufficientDataError
from ..results import Measure, result_or_none
from ..validation import check_is_fitted, column_and_mask
from .tree import fit_regression_tree

log = logging.getLogger(__name__)


@dataclass(eq=False)
class ForestFit:
    trees: list
    oob_perm_importance: np.ndarray   # mean OOB MSE increase per parameter
    impurity_importance: np.ndarray   # mean summed split improvement per tree
    oob_r2: float
    b: int


def fit_random_forest(design_or_x, outputs, column=0, b=500, mtry=None,
                      min_node_size=5, seed=0):
    """Bootstrap-aggregated regression trees with OOB importance scores."""
    if hasattr(design_or_x, "unit"):
        x = design_or_x.mapped
        y, valid = column_and_mask(design_or_x, outputs, column)
        x, y = x[valid], y[valid]
    else:
        x = np.asarray(design_or_x, dtype=float)
        y = np.asarray(outputs, dtype=float)
    n, k = x.shape
    if b < 1:
        raise InsufficientDataError("need at least one tree")
    if b < 30:
        log.warning("B=%d trees gives unstable out-of-bag estimates", b)
    if mtry is None:
        mtry = max(1, k // 3)
    seeds = np.random.SeedSequence(seed).spawn(b)
    trees = []
    perm_inc = np.zeros(k)
    perm_trees = 0
    impurity = np.zeros(k)
    oob_sum = np.zeros(n)
    oob_cnt = np.zeros(n)
    for ti in range(b):
        rng = np.random.default_rng(seeds[ti])
        boot = rng.integers(n, size=n)
        oob = np.setdiff1d(np.arange(n), boot, assume_unique=False)
        tree = fit_regression_tree(x[boot], y[boot], min_node_size=min_node_size,
                                   min_improve=0.0, mtry=mtry, rng=rng)
        trees.append(tree)
        impurity += tree.importance
        if oob.size == 0:
            continue
        pred = tree.predict(x[oob])
        oob_sum[oob] += pred
        oob_cnt[oob] += 1
        base_mse = float(((pred - y[oob]) ** 2).mean())
        perm_trees += 1
        for j in range(k):
            x_perm = x[oob].copy()
            x_perm[:, j] = x_perm[rng.permutation(oob.size), j]
            mse_j = float(((tree.predict(x_perm) - y[oob]) ** 2).mean())
            perm_inc[j] += mse_j - base_mse
    impurity /= b
    perm_inc /= max(perm_trees, 1)
    seen = oob_cnt > 0
    if seen.any() and y[seen].var() > 0:
        mse_oob = float(((oob_sum[seen] / oob_cnt[seen] - y[seen]) ** 2).mean())
        oob_r2 = 1.0 - mse_oob / float(y[seen].var())
    else:
        oob_r2 = np.nan
    return ForestFit(trees=trees, oob_perm_importance=perm_inc,
                     impurity_importance=impurity, oob_r2=oob_r2, b=b)


def forest_predict(fit, x):
    x = np.asarray(x, dtype=float)
    acc = np.zeros(x.shape[0])
    for tree in fit.trees:
        acc += tree.predict(x)
    return acc / len(fit.trees)


class RandomForestAnalyzer(BaseEstimator):
    """Estimator-style wrapper exposing both forest importance measures.

    The two measures can disagree in order for near-tied parameters; when the
    top parameter differs between them a warning is logged, matching how such
    reversals should be read (a sign of ties, not an error).
    """

    def __init__(self, column=0, b=500, mtry=None, min_node_size=5, seed=0):
        self.column = column
        self.b = b
        self.mtry = mtry
        self.min_node_size = min_node_size
        self.seed = seed

    def fit(self, design, outputs):
        f = fit_random_forest(design, outputs, column=self.column, b=self.b,
                              mtry=self.mtry, min_node_size=self.min_node_size,
                              seed=self.seed)
        self.forest_ = f
        self.oob_perm_importance_ = f.oob_perm_importance
        self.impurity_importance_ = f.impurity_importance
        self.oob_r2_ = f.oob_r2
        names = design.space.names
        extra = {"oob_r2": f.oob_r2, "b": f.b}
        perm_raw = np.clip(f.oob_perm_importance, 0.0, None)
        self.result_ = result_or_none(
            Measure.FOREST_PERMUTATION, names, perm_raw,
            extra=dict(extra, point=f.oob_perm_importance))
        self.result_impurity_ = result_or_none(
            Measure.FOREST_IMPURITY, names, f.impurity_importance, extra=extra)
        if (self.result_ is not None and self.result_impurity_ is not None
                and np.argmax(perm_raw) != np.argmax(f.impurity_importance)):
            log.warning("forest importance measures disagree on the top "
                        "parameter; treat the leaders as near-tied")
        return self

    def results(self):
        check_is_fitted(self, "forest_")
        out = {}
        if self.result_ is not None:
            out[Measure.FOREST_PERMUTATION] = self.result_
        if self.result_impurity_ is not None:
            out[Measure.FOREST_IMPURITY] = self.result_impurity_
        return out
