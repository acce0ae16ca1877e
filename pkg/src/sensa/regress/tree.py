"""CART regression tree with variance-reduction splitting.

Splits maximize SSE(parent) - SSE(left) - SSE(right), recursion stops on node
size or when the best improvement falls under a fraction of the root SSE, and
no post-pruning is applied: given those stops, the maximal tree is kept.
Importance accumulates the absolute SSE reduction of every split on a
parameter; surrogate splits are not used (inputs are space filling, so there
is no missingness for surrogates to route around).
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import InsufficientDataError
from ..results import Measure, SensitivityResult
from ..validation import check_is_fitted, column_and_mask

LEAF = -1


@dataclass(eq=False)
class RegTree:
    """Flat-array binary tree plus per-parameter importance and leaf table."""

    feature: np.ndarray        # split parameter per node, LEAF for leaves
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray          # node mean
    n_samples: np.ndarray
    improvement: np.ndarray    # SSE reduction achieved by the node's split
    importance: np.ndarray     # K, summed improvements per parameter
    leaf_ids: np.ndarray       # per training sample
    fitted: np.ndarray         # per training sample (its leaf mean)
    root_sse: float

    @property
    def n_nodes(self):
        return self.feature.size

    @property
    def n_leaves(self):
        return int((self.feature == LEAF).sum())

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        node = np.zeros(x.shape[0], dtype=int)
        while True:
            feat = self.feature[node]
            todo = feat != LEAF
            if not todo.any():
                break
            idx = np.nonzero(todo)[0]
            go_left = x[idx, feat[idx]] <= self.threshold[node[idx]]
            node[idx] = np.where(go_left, self.left[node[idx]], self.right[node[idx]])
        return self.value[node]

    def apply(self, x):
        """Leaf id per row of x."""
        x = np.asarray(x, dtype=float)
        node = np.zeros(x.shape[0], dtype=int)
        while True:
            feat = self.feature[node]
            todo = feat != LEAF
            if not todo.any():
                return node
            idx = np.nonzero(todo)[0]
            go_left = x[idx, feat[idx]] <= self.threshold[node[idx]]
            node[idx] = np.where(go_left, self.left[node[idx]], self.right[node[idx]])

    def leaf_table(self):
        """(sample index, leaf id, fitted value) rows for heatmap-style export."""
        return [(int(i), int(l), float(v))
                for i, (l, v) in enumerate(zip(self.leaf_ids, self.fitted))]


def _node_sse(y_sum, y_sq, m):
    return max(y_sq - y_sum * y_sum / m, 0.0)


def _best_split(x, y, idx, features, min_node_size):
    """Best (feature, threshold, improvement, partition) over the candidates."""
    m = idx.size
    y_node = y[idx]
    total, total_sq = y_node.sum(), float(y_node @ y_node)
    sse_parent = _node_sse(total, total_sq, m)
    best = None
    for j in features:
        xv = x[idx, j]
        order = np.argsort(xv, kind="stable")
        xs = xv[order]
        ys = y_node[order]
        c1 = np.cumsum(ys)
        c2 = np.cumsum(ys * ys)
        pos = np.arange(1, m)
        ok = (xs[1:] > xs[:-1]) & (pos >= min_node_size) & (m - pos >= min_node_size)
        if not ok.any():
            continue
        nl = pos[ok].astype(float)
        s1l, s2l = c1[:-1][ok], c2[:-1][ok]
        sse_l = np.maximum(s2l - s1l * s1l / nl, 0.0)
        nr = m - nl
        s1r, s2r = total - s1l, total_sq - s2l
        sse_r = np.maximum(s2r - s1r * s1r / nr, 0.0)
        gain = sse_parent - sse_l - sse_r
        b = np.argmax(gain)
        if best is None or gain[b] > best[0]:
            cut = pos[ok][b]
            thr = 0.5 * (xs[cut - 1] + xs[cut])
            best = (float(gain[b]), j, thr, idx[order[:cut]], idx[order[cut:]])
    return best, sse_parent


def fit_regression_tree(design_or_x, outputs, column=0, min_node_size=20,
                        min_improve=0.01, mtry=None, rng=None):
    """Grow the maximal CART tree under the configured stopping rules.

    min_improve is relative: a split must recover at least that fraction of
    the root SSE. mtry (used by forests) restricts each node's candidate
    features to a random subset. A constant response yields a single-leaf
    tree with zero importance everywhere; that is a result, not an error.
    """
    if hasattr(design_or_x, "unit"):
        x = design_or_x.mapped
        y, valid = column_and_mask(design_or_x, outputs, column)
        x, y = x[valid], y[valid]
    else:
        x = np.asarray(design_or_x, dtype=float)
        y = np.asarray(outputs, dtype=float)
    n, k = x.shape
    if n < 2 * min_node_size:
        raise InsufficientDataError(
            f"{n} rows cannot host two children of size {min_node_size}")
    feature, threshold, left, right = [], [], [], []
    value, n_samples, improvement = [], [], []
    importance = np.zeros(k)
    leaf_of = np.empty(n, dtype=int)
    root_sse = _node_sse(y.sum(), float(y @ y), n)
    min_gain = min_improve * root_sse

    def new_node(idx):
        feature.append(LEAF)
        threshold.append(np.nan)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[idx].mean()))
        n_samples.append(idx.size)
        improvement.append(0.0)
        return len(feature) - 1

    stack = [(new_node(np.arange(n)), np.arange(n))]
    while stack:
        node, idx = stack.pop()
        if idx.size < 2 * min_node_size:
            leaf_of[idx] = node
            continue
        if mtry is not None and mtry < k:
            cand = rng.choice(k, size=mtry, replace=False)
        else:
            cand = range(k)
        best, _ = _best_split(x, y, idx, cand, min_node_size)
        if best is None or best[0] < min_gain or best[0] <= 0.0:
            leaf_of[idx] = node
            continue
        gain, j, thr, idx_l, idx_r = best
        feature[node] = j
        threshold[node] = thr
        improvement[node] = gain
        importance[j] += gain
        left[node] = new_node(idx_l)
        right[node] = new_node(idx_r)
        stack.append((right[node], idx_r))
        stack.append((left[node], idx_l))
    value_arr = np.array(value)
    tree = RegTree(feature=np.array(feature), threshold=np.array(threshold),
                   left=np.array(left), right=np.array(right), value=value_arr,
                   n_samples=np.array(n_samples),
                   improvement=np.array(improvement), importance=importance,
                   leaf_ids=leaf_of.copy(), fitted=value_arr[leaf_of],
                   root_sse=root_sse)
    return tree


class RegressionTreeAnalyzer(BaseEstimator):
    """Estimator-style wrapper: importance shares from a single maximal tree."""

    def __init__(self, column=0, min_node_size=20, min_improve=0.01):
        self.column = column
        self.min_node_size = min_node_size
        self.min_improve = min_improve

    def fit(self, design, outputs):
        tree = fit_regression_tree(design, outputs, column=self.column,
                                   min_node_size=self.min_node_size,
                                   min_improve=self.min_improve)
        self.tree_ = tree
        self.importance_ = tree.importance
        if tree.importance.sum() > 0:
            self.result_ = SensitivityResult.from_raw(
                Measure.TREE_IMPORTANCE, design.space.names, tree.importance,
                extra={"n_leaves": tree.n_leaves, "root_sse": tree.root_sse})
        else:
            # constant response: a single leaf and nothing to rank
            self.result_ = None
        return self

    def results(self):
        check_is_fitted(self, "tree_")
        return {} if self.result_ is None else {Measure.TREE_IMPORTANCE: self.result_}
