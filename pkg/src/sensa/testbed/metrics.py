"""Goodness-of-fit summaries for simulated vs observed series."""

import numpy as np

from ..errors import DegenerateOutputError, StructuralError


def _check(sim, obs):
    sim = np.asarray(sim, dtype=float)
    obs = np.asarray(obs, dtype=float)
    if sim.shape != obs.shape or sim.ndim != 1:
        raise StructuralError("sim and obs must be 1-D series of equal length")
    if sim.size < 2:
        raise StructuralError("need at least two points")
    if obs.std() == 0:
        raise DegenerateOutputError("observed series is constant")
    return sim, obs


def nse(sim, obs):
    """Nash-Sutcliffe efficiency: 1 - SSE / SS_about_the_obs_mean."""
    sim, obs = _check(sim, obs)
    return 1.0 - float(((sim - obs) ** 2).sum() / ((obs - obs.mean()) ** 2).sum())


def kge(sim, obs):
    """Kling-Gupta efficiency: 1 - sqrt((r-1)^2 + (alpha-1)^2 + (beta-1)^2)
    with alpha the std ratio and beta the mean ratio (sim over obs)."""
    sim, obs = _check(sim, obs)
    if obs.mean() == 0:
        raise DegenerateOutputError("observed mean is zero; beta undefined")
    if sim.std() == 0:
        r = 0.0
    else:
        r = float(np.corrcoef(sim, obs)[0, 1])
    alpha = float(sim.std(ddof=1) / obs.std(ddof=1))
    beta = float(sim.mean() / obs.mean())
    return 1.0 - float(np.sqrt((r - 1.0) ** 2 + (alpha - 1.0) ** 2 + (beta - 1.0) ** 2))
