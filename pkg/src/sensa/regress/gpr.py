"""Gaussian process regression with a linear mean trend and a power
exponential correlation over unit-cube inputs:

    rho_ij = exp( - sum_k |u_ik - u_jk|^alpha / gamma_k )

Two importance readings come out of one fit: the absolute standardized trend
slopes (mean-structure importance, like the regression SRC) and the
normalized inverse range parameters 1/gamma_k (residual-structure importance;
inert inputs are pushed to huge ranges and so get the smallest shares).

Range parameters are fit by maximizing the profile marginal likelihood with a
bounded derivative-free search restarted from several random points; the
simulators are deterministic, so no nugget is used beyond the numerical
jitter needed to keep the Cholesky factorization alive.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import minimize
from sklearn.base import BaseEstimator

from ..errors import ConditioningError, InsufficientDataError
from ..results import Measure, SensitivityResult
from ..validation import check_is_fitted, column_and_mask

log = logging.getLogger(__name__)

LOG_GAMMA_BOUNDS = (-7.0, 14.0)
JITTERS = (1e-10, 1e-8, 1e-6, 1e-4)


@dataclass(eq=False)
class GprFit:
    trend_beta: np.ndarray         # K+1, intercept first
    trend_src_abs: np.ndarray      # K, |standardized slopes|
    ranges: np.ndarray             # K, gamma_k
    inv_range_norm: np.ndarray     # K, sums to one
    alpha_exp: float
    sigma2: float
    log_lik: float
    subsample_idx: np.ndarray
    n_used: int


def _chol_with_jitter(r):
    for jitter in JITTERS:
        try:
            return cho_factor(r + jitter * np.eye(r.shape[0]), lower=True), jitter
        except np.linalg.LinAlgError:
            continue
    raise ConditioningError("correlation matrix stayed singular through jitter escalation")


def _profile_nll(log_gamma, pow_dist, h, y):
    """Negative log profile likelihood; +inf where the factorization fails."""
    n = y.size
    r = np.exp(-np.tensordot(np.exp(-log_gamma), pow_dist, axes=1))
    try:
        cf, _ = _chol_with_jitter(r)
    except ConditioningError:
        return np.inf
    rinv_h = cho_solve(cf, h)
    rinv_y = cho_solve(cf, y)
    hth = h.T @ rinv_h
    try:
        beta = np.linalg.solve(hth, h.T @ rinv_y)
    except np.linalg.LinAlgError:
        return np.inf
    resid = y - h @ beta
    sigma2 = max(float(resid @ cho_solve(cf, resid)) / n, 1e-12 * float(y.var() + 1e-300))
    logdet = 2.0 * np.log(np.diag(cf[0])).sum()
    return 0.5 * (n * np.log(sigma2) + logdet)


def fit_gpr(design, outputs, column=0, max_n=500, alpha_exp=1.9, seed=0,
            restarts=8, tol=1e-6):
    """Fit the GP emulator on (a subsample of) the valid design rows.

    Inputs enter in unit-cube coordinates so the fitted ranges, and therefore
    the normalized inverse ranges, are comparable across parameters.
    """
    y_all, valid = column_and_mask(design, outputs, column)
    k = design.k
    idx = np.nonzero(valid)[0]
    if idx.size < k + 2:
        raise InsufficientDataError(f"{idx.size} valid rows cannot support K+2={k + 2}")
    rng = np.random.default_rng(seed)
    if idx.size > max_n:
        idx = np.sort(rng.choice(idx, size=max_n, replace=False))
    u = design.unit[idx]
    y = y_all[idx]
    n = y.size
    h = np.column_stack([np.ones(n), u])
    pow_dist = np.abs(u[:, None, :] - u[None, :, :]) ** alpha_exp
    pow_dist = np.moveaxis(pow_dist, 2, 0)          # (K, n, n)

    lo, hi = LOG_GAMMA_BOUNDS
    starts = [np.full(k, 0.5 * (lo + hi))]
    starts += [rng.uniform(lo, hi, size=k) for _ in range(restarts)]
    best = None
    for x0 in starts:
        res = minimize(_profile_nll, x0, args=(pow_dist, h, y), method="Powell",
                       bounds=[(lo, hi)] * k,
                       options={"xtol": tol, "ftol": tol, "maxiter": 200 * k})
        if not np.isfinite(res.fun):
            continue
        if best is None or res.fun < best.fun:
            best = res
    if best is None:
        raise ConditioningError("no GPR range configuration was factorizable")
    log_gamma = np.clip(best.x, lo, hi)
    gamma = np.exp(log_gamma)

    r = np.exp(-np.tensordot(1.0 / gamma, pow_dist, axes=1))
    cf, jitter = _chol_with_jitter(r)
    rinv_h = cho_solve(cf, h)
    hth = h.T @ rinv_h
    beta = np.linalg.solve(hth, h.T @ cho_solve(cf, y))
    resid = y - h @ beta
    sigma2 = float(resid @ cho_solve(cf, resid)) / n
    hth_inv = np.linalg.inv(hth)
    se = np.sqrt(np.maximum(sigma2 * np.diag(hth_inv), 0.0))
    if np.all(se[1:] > 0):
        src = np.abs(beta[1:] / se[1:])
    else:
        # degenerate exact trend fit: rank by the slopes themselves
        src = np.abs(beta[1:])
    inv = 1.0 / gamma
    logdet = 2.0 * np.log(np.diag(cf[0])).sum()
    log_lik = -0.5 * (n * np.log(max(sigma2, 1e-300)) + logdet)
    return GprFit(trend_beta=beta, trend_src_abs=src, ranges=gamma,
                  inv_range_norm=inv / inv.sum(), alpha_exp=alpha_exp,
                  sigma2=sigma2, log_lik=log_lik, subsample_idx=idx, n_used=n)


def profile_loglik(design, outputs, log_gamma, column=0, max_n=500,
                   alpha_exp=1.9, seed=0):
    """Log profile likelihood at given log ranges (same subsample as fit_gpr)."""
    y_all, valid = column_and_mask(design, outputs, column)
    idx = np.nonzero(valid)[0]
    rng = np.random.default_rng(seed)
    if idx.size > max_n:
        idx = np.sort(rng.choice(idx, size=max_n, replace=False))
    u = design.unit[idx]
    y = y_all[idx]
    h = np.column_stack([np.ones(y.size), u])
    pow_dist = np.moveaxis(np.abs(u[:, None, :] - u[None, :, :]) ** alpha_exp, 2, 0)
    return -_profile_nll(np.asarray(log_gamma, dtype=float), pow_dist, h, y)


class GprAnalyzer(BaseEstimator):
    """Estimator-style wrapper exposing slope and inverse-range importances."""

    def __init__(self, column=0, max_n=500, alpha_exp=1.9, seed=0,
                 restarts=8, tol=1e-6):
        self.column = column
        self.max_n = max_n
        self.alpha_exp = alpha_exp
        self.seed = seed
        self.restarts = restarts
        self.tol = tol

    def fit(self, design, outputs):
        f = fit_gpr(design, outputs, column=self.column, max_n=self.max_n,
                    alpha_exp=self.alpha_exp, seed=self.seed,
                    restarts=self.restarts, tol=self.tol)
        self.fit_ = f
        self.trend_beta_ = f.trend_beta
        self.ranges_ = f.ranges
        self.inv_range_norm_ = f.inv_range_norm
        names = design.space.names
        extra = {"alpha_exp": f.alpha_exp, "log_lik": f.log_lik,
                 "sigma2": f.sigma2, "n_used": f.n_used}
        self.result_ = SensitivityResult.from_raw(
            Measure.GPR_SLOPE, names, f.trend_src_abs, extra=extra)
        self.result_inv_range_ = SensitivityResult.from_raw(
            Measure.GPR_INV_RANGE, names, f.inv_range_norm, extra=extra)
        return self

    def results(self):
        check_is_fitted(self)
        return {Measure.GPR_SLOPE: self.result_,
                Measure.GPR_INV_RANGE: self.result_inv_range_}
