"""Input-validation helpers shared by the analyzers."""

import numpy as np

from .data import OutputMatrix, check_aligned
from .errors import UnsupportedDesignError


def require_kind(design, kind_cls, what):
    if not isinstance(design.kind, kind_cls):
        raise UnsupportedDesignError(
            f"{what} requires a {kind_cls.__name__} design, "
            f"got {type(design.kind).__name__}"
        )


def as_output_matrix(y, n):
    """Accept an OutputMatrix, a vector, or an N x p array."""
    if isinstance(y, OutputMatrix):
        return y
    arr = np.asarray(y, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    names = tuple(f"y{j}" for j in range(arr.shape[1]))
    out = OutputMatrix(arr, names)
    if out.n != n:
        raise ValueError(f"outputs have {out.n} rows, design has {n}")
    return out


def column_and_mask(design, outputs, column):
    """Row-aligned (values, validity) for one output column."""
    outputs = as_output_matrix(outputs, design.n)
    check_aligned(design, outputs)
    return outputs.column(column), outputs.valid.copy()


def check_is_fitted(estimator, attr="result_"):
    if not hasattr(estimator, attr):
        raise RuntimeError(
            f"{type(estimator).__name__} has not been fitted yet; call fit first"
        )
