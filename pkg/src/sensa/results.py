"""Per-method sensitivity measures and the shared sum-to-one scaling."""

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, DomainError, StructuralError


class Measure(str, enum.Enum):
    """The ten importance measures the toolkit can produce."""

    MORRIS_DGSM = "morris_dgsm"
    SOBOL_S1 = "sobol_s1"
    SOBOL_T = "sobol_t"
    VARS_TO = "vars_to"
    REG_SRC = "reg_src"
    TREE_IMPORTANCE = "tree_importance"
    FOREST_PERMUTATION = "forest_permutation"
    FOREST_IMPURITY = "forest_impurity"
    GPR_SLOPE = "gpr_slope"
    GPR_INV_RANGE = "gpr_inv_range"

    def __str__(self):
        return self.value


def scale_to_unit_sum(raw):
    """Scale a nonnegative vector to sum to one (the comparison convention).

    Producers turn sign-carrying measures (regression slopes, Morris mu) into
    magnitudes before they get here; negativity is rejected, not absorbed.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 1:
        raise StructuralError("expected a 1-D vector of measures")
    if np.any(raw < 0) or not np.all(np.isfinite(raw)):
        raise DomainError("measures must be finite and nonnegative before scaling")
    total = raw.sum()
    if total <= 0:
        raise DegenerateInputError("all measures are zero; nothing to scale")
    return raw / total


@dataclass(frozen=True, eq=False)
class SensitivityResult:
    """Raw and sum-to-one scaled importance for one measure of one method.

    ``ci`` is a (K, 2) array of (low, high) bounds when the method provides
    them; ``extra`` carries method-specific attachments (Morris mu*/sigma,
    regression R-squared, dummy cutoffs, ...).
    """

    measure: Measure
    names: tuple
    raw: np.ndarray
    scaled: np.ndarray
    ci: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_raw(cls, measure, names, raw, ci=None, extra=None):
        raw = np.asarray(raw, dtype=float)
        scaled = scale_to_unit_sum(raw)
        if ci is not None:
            ci = np.asarray(ci, dtype=float)
            if ci.shape != (raw.size, 2):
                raise StructuralError("ci must be a (K, 2) array of (low, high)")
        return cls(Measure(measure), tuple(names), raw, scaled, ci, dict(extra or {}))

    @property
    def k(self):
        return self.raw.size

    def rank_order(self):
        """Parameter indices from most to least important."""
        return np.argsort(-self.scaled, kind="stable")


def result_or_none(measure, names, raw, ci=None, extra=None):
    """Build a result, or None when the clipped measures are all zero.

    Methods whose estimates can vanish entirely (constant outputs, pure-noise
    clipped indices) report nothing for that measure instead of erroring.
    """
    try:
        return SensitivityResult.from_raw(measure, names, raw, ci=ci, extra=extra)
    except DegenerateInputError:
        return None
