"""Multiple linear regression with |t|-statistic importance (SRC)."""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import InsufficientDataError, SingularFitError
from ..results import Measure, SensitivityResult
from ..validation import check_is_fitted, column_and_mask

R2_RULE_OF_THUMB = 0.7


@dataclass(frozen=True, eq=False)
class OlsFit:
    beta: np.ndarray          # K+1, intercept first
    se: np.ndarray
    t_abs: np.ndarray         # K, |beta_k / se_k| excluding the intercept
    r2: float
    r2_adj: float
    low_fit: bool             # R^2 below the 0.7 rule of thumb
    r2_quadratic: float | None = None
    n_used: int = 0


def _fit_linear(x, y):
    n, p = x.shape
    xtx = x.T @ x
    if np.linalg.matrix_rank(xtx) < p:
        raise SingularFitError("regression design is rank deficient")
    xtx_inv = np.linalg.inv(xtx)
    beta = xtx_inv @ (x.T @ y)
    resid = y - x @ beta
    sse = float(resid @ resid)
    return beta, resid, sse, xtx_inv


def ols_src(design, outputs, column=0, quadratic=False):
    """OLS of the output on the mapped parameters plus an intercept.

    Importance is the absolute t statistic per slope. An optional quadratic
    expansion (squares and all pairwise interactions) feeds only the reported
    fit quality, never the ranking: combining its coefficients into a single
    per-parameter measure has no agreed recipe.
    """
    y, valid = column_and_mask(design, outputs, column)
    k = design.k
    x_all = design.mapped[valid]
    y = y[valid]
    n = y.size
    if n < k + 2:
        raise InsufficientDataError(f"{n} valid rows cannot support K+2={k + 2}")
    x = np.column_stack([np.ones(n), x_all])
    beta, resid, sse, xtx_inv = _fit_linear(x, y)
    dof = n - (k + 1)
    sigma2 = sse / dof
    se = np.sqrt(np.maximum(sigma2 * np.diag(xtx_inv), 0.0))
    if np.all(se[1:] > 0):
        t_abs = np.abs(beta[1:] / se[1:])
    else:
        # exact fit: |t| blows up, fall back to classic standardized slopes
        t_abs = np.abs(beta[1:]) * x_all.std(axis=0, ddof=1)
    sst = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - sse / sst if sst > 0 else 0.0
    r2_adj = 1.0 - (1.0 - r2) * (n - 1) / dof if dof > 0 else r2
    r2_quad = None
    if quadratic:
        cols = [np.ones(n), x_all]
        cols.append(x_all ** 2)
        for a in range(k):
            for b in range(a + 1, k):
                cols.append((x_all[:, a] * x_all[:, b])[:, None])
        xq = np.column_stack(cols)
        if n > xq.shape[1] + 1:
            try:
                _, _, sse_q, _ = _fit_linear(xq, y)
                r2_quad = 1.0 - sse_q / sst if sst > 0 else 0.0
            except SingularFitError:
                r2_quad = None
    return OlsFit(beta=beta, se=se, t_abs=t_abs, r2=r2, r2_adj=r2_adj,
                  low_fit=r2 < R2_RULE_OF_THUMB, r2_quadratic=r2_quad, n_used=n)


class SrcRegression(BaseEstimator):
    """Estimator-style wrapper around the |t| regression importance."""

    def __init__(self, column=0, quadratic=False):
        self.column = column
        self.quadratic = quadratic

    def fit(self, design, outputs):
        f = ols_src(design, outputs, column=self.column, quadratic=self.quadratic)
        self.fit_ = f
        self.beta_ = f.beta
        self.t_abs_ = f.t_abs
        self.r2_ = f.r2
        self.result_ = SensitivityResult.from_raw(
            Measure.REG_SRC, design.space.names, f.t_abs,
            extra={"r2": f.r2, "r2_adj": f.r2_adj, "low_fit": f.low_fit,
                   "r2_quadratic": f.r2_quadratic, "n_used": f.n_used})
        return self

    def results(self):
        check_is_fitted(self)
        return {Measure.REG_SRC: self.result_}
