"""Design and output containers shared by every method.

Invalid output rows are masked, never deleted, so row indices stay aligned
with the paired design across the whole workflow. Block-structured
estimators rely on that positional pairing.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import StructuralError
from .space import map_unit_to_range

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LhsKind:
    """Latin hypercube metadata.

    ``oversample_total`` records that the rows are the prefix of a larger
    seeded oversample (batch-append support); ``approx_strata`` flags designs
    whose per-column stratification is no longer exact (prefixes, concatenations).
    """

    n: int
    maximin_sweeps: int = 0
    oversample_total: int | None = None
    approx_strata: bool = False


@dataclass(frozen=True, eq=False)
class MorrisOatKind:
    """One-at-a-time trajectories on the {0, 1/(levels-1), ..., 1} grid.

    Per-row arrays: ``trajectory`` is the trajectory index, ``step_param`` the
    parameter changed relative to the previous row (-1 for a trajectory head),
    ``step_delta`` the signed unit-cube step taken for that parameter.
    """

    r: int
    levels: int
    delta: float
    trajectory: np.ndarray = field(repr=False)
    step_param: np.ndarray = field(repr=False)
    step_delta: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class SobolBlocksKind:
    """Row layout [A; B; AB_1 ... AB_K], each block of base_n rows."""

    base_n: int
    rule: str = "lhs"


@dataclass(frozen=True, eq=False)
class VarsStarsKind:
    """Star centers plus per-dimension cross sections on the h-grid.

    ``star``/``dim``/``grid_pos`` are per-row; centers carry dim = -1 and
    grid_pos = -1. ``center_grid`` holds each center's integer grid coordinates
    (centers are snapped to the grid before sections are generated).
    """

    centers: int
    h: float
    star: np.ndarray = field(repr=False)
    dim: np.ndarray = field(repr=False)
    grid_pos: np.ndarray = field(repr=False)
    center_grid: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """N x K sampled input combinations in unit-cube coordinates.

    ``mapped`` (model units) is derived on demand from the space's ranges.
    """

    space: object
    unit: np.ndarray
    kind: object
    seed: int

    def __post_init__(self):
        u = np.asarray(self.unit, dtype=float)
        if u.ndim != 2 or u.shape[1] != self.space.k:
            raise StructuralError(f"unit matrix shape {u.shape} does not match K={self.space.k}")
        if u.shape[0] < 1:
            raise StructuralError("a design needs at least one row")
        if u.size and (u.min() < 0.0 or u.max() > 1.0):
            raise StructuralError("unit design entries must lie in [0, 1]")
        object.__setattr__(self, "unit", u)

    @property
    def n(self):
        return self.unit.shape[0]

    @property
    def k(self):
        return self.unit.shape[1]

    @property
    def mapped(self):
        return map_unit_to_range(self.space, self.unit)


@dataclass(frozen=True, eq=False)
class OutputMatrix:
    """N x p simulator outputs plus a row-validity mask.

    Non-finite values force the whole row invalid at construction time:
    failed runs have no meaningful value, so they are masked, not imputed.
    """

    values: np.ndarray
    output_names: tuple
    valid: np.ndarray

    def __init__(self, values, output_names, valid=None):
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if values.ndim != 2:
            raise StructuralError("output values must form an N x p matrix")
        names = tuple(output_names)
        if len(names) != values.shape[1]:
            raise StructuralError(
                f"{len(names)} output names for {values.shape[1]} columns"
            )
        finite = np.isfinite(values).all(axis=1)
        if valid is None:
            valid = finite
        else:
            valid = np.asarray(valid, dtype=bool)
            if valid.shape != (values.shape[0],):
                raise StructuralError("validity mask length must equal the row count")
            valid = valid & finite
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "output_names", names)
        object.__setattr__(self, "valid", valid)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    def column_index(self, column):
        if isinstance(column, str):
            try:
                return self.output_names.index(column)
            except ValueError:
                raise StructuralError(f"unknown output column {column!r}") from None
        return int(column)

    def column(self, column):
        return self.values[:, self.column_index(column)]

    def n_valid(self):
        return int(self.valid.sum())


def check_aligned(design, outputs):
    if design.n != outputs.n:
        raise StructuralError(
            f"design has {design.n} rows but outputs have {outputs.n}"
        )


def filter_outputs(outputs, predicate):
    """Return a copy whose mask is ANDed with a per-row acceptability rule.

    The predicate sees the row's output values and returns True to keep it.
    A predicate that raises on a row marks that row invalid (and logs it)
    rather than aborting the whole filter pass. Values are never touched.
    """
    keep = np.ones(outputs.n, dtype=bool)
    for i in range(outputs.n):
        if not outputs.valid[i]:
            keep[i] = False
            continue
        try:
            keep[i] = bool(predicate(outputs.values[i]))
        except Exception:
            log.warning("filter predicate failed on row %d; masking it", i)
            keep[i] = False
    rejected = int((outputs.valid & ~keep).sum())
    if rejected:
        log.info("filtering rejected %d of %d previously valid rows",
                 rejected, outputs.n_valid())
    return OutputMatrix(outputs.values, outputs.output_names, keep)


def log_transform_output(outputs, column):
    """Replace one column by its natural log; non-positive rows are masked."""
    j = outputs.column_index(column)
    values = outputs.values.copy()
    col = values[:, j]
    bad = outputs.valid & ~(col > 0.0)
    if bad.any():
        log.warning("log transform masked %d rows with non-positive %r",
                    int(bad.sum()), outputs.output_names[j])
    with np.errstate(invalid="ignore", divide="ignore"):
        values[:, j] = np.where(col > 0.0, np.log(col), np.nan)
    return OutputMatrix(values, outputs.output_names, outputs.valid & ~bad)
