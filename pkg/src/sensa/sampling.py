"""Space-filling designs: LHS with maximin sweeps, Morris one-at-a-time
trajectories, Sobol' estimator blocks, and VARS star cross sections.

Every generator is deterministic under a fixed (space, config, seed) triple;
independent designs may be generated in parallel by callers.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .data import DesignMatrix, LhsKind, MorrisOatKind, SobolBlocksKind, VarsStarsKind
from .errors import ConfigError, UnsupportedDesignError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LhsConfig:
    n: int
    seed: int = 0
    maximin_sweeps: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("LHS needs n >= 1")
        if self.maximin_sweeps < 0:
            raise ConfigError("maximin_sweeps must be nonnegative")


@dataclass(frozen=True)
class MorrisDesignConfig:
    r: int
    levels: int = 20
    delta: float | None = None

    def __post_init__(self):
        if self.r < 1:
            raise ConfigError("Morris needs at least one trajectory")
        if self.levels < 2 or self.levels % 2 != 0:
            raise ConfigError("levels must be a positive even integer")

    def resolved_delta(self):
        """Default step is levels / (2 (levels - 1)), half the grid span."""
        if self.delta is None:
            return self.levels / (2.0 * (self.levels - 1))
        return float(self.delta)

    def delta_steps(self):
        """Step expressed in grid units; must land exactly on the grid."""
        d = self.resolved_delta()
        if not 0.0 < d < 1.0:
            raise ConfigError("delta must lie in (0, 1)")
        steps = d * (self.levels - 1)
        if abs(steps - round(steps)) > 1e-9 or round(steps) < 1:
            raise ConfigError(
                f"delta={d} is off the {self.levels}-level grid "
                f"(delta*(levels-1) must be a positive integer)"
            )
        return int(round(steps))


@dataclass(frozen=True)
class SobolBlockConfig:
    base_n: int
    rule: str = "lhs"

    def __post_init__(self):
        if self.base_n < 2:
            raise ConfigError("Sobol' blocks need base_n >= 2")
        if self.rule not in ("lhs", "qmc"):
            raise ConfigError(f"unknown A/B generation rule {self.rule!r}")


@dataclass(frozen=True)
class VarsStarConfig:
    centers: int
    h: float = 0.1

    def __post_init__(self):
        if self.centers < 1:
            raise ConfigError("VARS needs at least one star center")
        if not 0.0 < self.h <= 0.5:
            raise ConfigError("h must lie in (0, 0.5]")
        g = 1.0 / self.h
        if abs(g - round(g)) > 1e-9:
            raise ConfigError("1/h must be an integer so the axis grid is uniform")

    def grid_segments(self):
        return int(round(1.0 / self.h))


def _lhs_unit(n, k, rng):
    """Plain LHS: one uniform draw per stratum per column, strata permuted."""
    u = np.empty((n, k))
    for j in range(k):
        perm = rng.permutation(n)
        u[:, j] = (perm + rng.random(n)) / n
    return u


def _maximin_sweeps(u, sweeps, rng):
    """Swap-based maximin improvement: keep only swaps that strictly raise the
    minimum pairwise distance. Column swaps preserve the LHS marginals.

    Uses an O(n^2) distance matrix, so it is meant for designs of modest size.
    """
    n, k = u.shape
    if sweeps == 0 or n < 3:
        return u
    u = u.copy()
    d2 = ((u[:, None, :] - u[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    best = d2.min()
    for _ in range(sweeps * n):
        j = rng.integers(k)
        a, b = rng.choice(n, size=2, replace=False)
        old_a, old_b = u[a, j], u[b, j]
        u[a, j], u[b, j] = old_b, old_a
        row_a = ((u - u[a]) ** 2).sum(axis=1)
        row_b = ((u - u[b]) ** 2).sum(axis=1)
        row_a[a] = row_b[b] = np.inf
        saved = (d2[a].copy(), d2[b].copy())
        d2[a], d2[:, a] = row_a, row_a
        d2[b], d2[:, b] = row_b, row_b
        cand = d2.min()
        if cand > best:
            best = cand
        else:
            u[a, j], u[b, j] = old_a, old_b
            d2[a], d2[:, a] = saved[0], saved[0]
            d2[b], d2[:, b] = saved[1], saved[1]
    return u


def lhs_maximin(space, cfg):
    """Latin hypercube design with optional maximin improvement sweeps."""
    rng = np.random.default_rng(cfg.seed)
    u = _lhs_unit(cfg.n, space.k, rng)
    u = _maximin_sweeps(u, cfg.maximin_sweeps, rng)
    kind = LhsKind(n=cfg.n, maximin_sweeps=cfg.maximin_sweeps)
    return DesignMatrix(space, u, kind, cfg.seed)


def lhs_prefix(space, cfg, oversample_total):
    """First cfg.n rows of a seeded oversample of the given total size.

    Later batches can be pulled off the same oversample (see append_batch).
    The prefix of a larger LHS is itself only approximately stratified.
    """
    if oversample_total < cfg.n:
        raise ConfigError("oversample must be at least as large as the prefix")
    rng = np.random.default_rng(cfg.seed)
    u = _lhs_unit(oversample_total, space.k, rng)
    u = _maximin_sweeps(u, cfg.maximin_sweeps, rng)
    kind = LhsKind(n=cfg.n, maximin_sweeps=cfg.maximin_sweeps,
                   oversample_total=oversample_total,
                   approx_strata=cfg.n != oversample_total)
    return DesignMatrix(space, u[:cfg.n], kind, cfg.seed)


def append_batch(existing, extra):
    """Grow an LHS design by extra.n rows.

    When the existing design is a prefix of a seeded oversample, the extension
    is the next slice of that same oversample and the original rows are
    reproduced bit for bit. Otherwise an independent batch (extra.seed) is
    concatenated and the result is flagged as only approximately stratified.
    Morris/Sobol'/VARS designs cannot be appended to: their layouts are
    functions of the total run count.
    """
    kind = existing.kind
    if not isinstance(kind, LhsKind):
        raise UnsupportedDesignError(
            f"cannot append to a {type(kind).__name__} design; "
            "regenerate it at the larger size instead"
        )
    total = existing.n + extra.n
    if kind.oversample_total is not None and total <= kind.oversample_total:
        cfg = LhsConfig(total, existing.seed, kind.maximin_sweeps)
        grown = lhs_prefix(existing.space, cfg, kind.oversample_total)
        if not np.array_equal(grown.unit[:existing.n], existing.unit):
            raise ConfigError("existing design is not a prefix of its declared oversample")
        return grown
    rng = np.random.default_rng(extra.seed)
    fresh = _lhs_unit(extra.n, existing.space.k, rng)
    fresh = _maximin_sweeps(fresh, extra.maximin_sweeps, rng)
    u = np.vstack([existing.unit, fresh])
    new_kind = LhsKind(n=total, maximin_sweeps=0, approx_strata=True)
    log.info("appended %d independent LHS rows; stratification is now approximate",
             extra.n)
    return DesignMatrix(existing.space, u, new_kind, existing.seed)


def morris_oat(space, cfg, seed):
    """r one-at-a-time trajectories of K+1 points each on the level grid.

    Trajectories are built in integer grid units so every coordinate is an
    exact grid value; elementary-effect steps are +/- delta in the unit cube.
    """
    k = space.k
    p = cfg.levels
    steps = cfg.delta_steps()
    if steps > p - 1:
        raise ConfigError("delta exceeds the grid span")
    rng = np.random.default_rng(seed)
    rows = np.empty((cfg.r * (k + 1), k))
    trajectory = np.empty(cfg.r * (k + 1), dtype=int)
    step_param = np.full(cfg.r * (k + 1), -1, dtype=int)
    step_delta = np.zeros(cfg.r * (k + 1))
    denom = p - 1
    i = 0
    for t in range(cfg.r):
        direction = rng.choice([-1, 1], size=k)
        grid = np.empty(k, dtype=int)
        for j in range(k):
            # start levels leaving room for the assigned move
            if direction[j] > 0:
                grid[j] = rng.integers(0, p - steps)
            else:
                grid[j] = rng.integers(steps, p)
        order = rng.permutation(k)
        rows[i] = grid / denom
        trajectory[i] = t
        i += 1
        for j in order:
            grid[j] += direction[j] * steps
            rows[i] = grid / denom
            trajectory[i] = t
            step_param[i] = j
            step_delta[i] = direction[j] * steps / denom
            i += 1
    kind = MorrisOatKind(r=cfg.r, levels=p, delta=steps / denom,
                         trajectory=trajectory, step_param=step_param,
                         step_delta=step_delta)
    return DesignMatrix(space, rows, kind, seed)


def sobol_blocks(space, cfg, seed):
    """Rows [A; B; AB_1 ... AB_K] for the Saltelli/Jansen estimators.

    A and B default to two independent seeded LHS draws; rule="qmc" swaps in a
    scrambled Sobol' sequence of dimension 2K split into the two matrices.
    """
    k = space.k
    if cfg.rule == "qmc":
        sampler = qmc.Sobol(d=2 * k, scramble=True, seed=seed)
        ab = sampler.random(cfg.base_n)
        a, b = ab[:, :k], ab[:, k:]
    else:
        seq = np.random.SeedSequence(seed)
        rng_a, rng_b = (np.random.default_rng(s) for s in seq.spawn(2))
        a = _lhs_unit(cfg.base_n, k, rng_a)
        b = _lhs_unit(cfg.base_n, k, rng_b)
    blocks = [a, b]
    for j in range(k):
        ab_j = a.copy()
        ab_j[:, j] = b[:, j]
        blocks.append(ab_j)
    kind = SobolBlocksKind(base_n=cfg.base_n, rule=cfg.rule)
    return DesignMatrix(space, np.vstack(blocks), kind, seed)


def vars_stars(space, cfg, seed):
    """Star centers plus full per-dimension cross sections on the h-grid.

    Centers are LHS-drawn and snapped to the grid so the center itself is a
    section point; each dimension then contributes every other grid position
    with the remaining coordinates held at the center.
    """
    k = space.k
    g = cfg.grid_segments()
    rng = np.random.default_rng(seed)
    raw_centers = _lhs_unit(cfg.centers, k, rng)
    center_grid = np.rint(raw_centers * g).astype(int)
    rows, star, dim, grid_pos = [], [], [], []
    for s in range(cfg.centers):
        center = center_grid[s] / g
        rows.append(center)
        star.append(s)
        dim.append(-1)
        grid_pos.append(-1)
        for j in range(k):
            for pos in range(g + 1):
                if pos == center_grid[s, j]:
                    continue
                pt = center.copy()
                pt[j] = pos / g
                rows.append(pt)
                star.append(s)
                dim.append(j)
                grid_pos.append(pos)
    kind = VarsStarsKind(centers=cfg.centers, h=1.0 / g,
                         star=np.array(star), dim=np.array(dim),
                         grid_pos=np.array(grid_pos), center_grid=center_grid)
    return DesignMatrix(space, np.array(rows), kind, seed)
