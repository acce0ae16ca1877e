"""Parameter definitions and the unit-cube <-> model-unit affine mapping."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, StructuralError


@dataclass(frozen=True)
class ParameterDef:
    """One named input parameter with its [lower, upper] range in model units."""

    name: str
    lower: float
    upper: float

    def __post_init__(self):
        if not self.name:
            raise ConfigError("parameter name must be nonempty")
        if not np.isfinite(self.lower) or not np.isfinite(self.upper):
            raise ConfigError(f"{self.name}: bounds must be finite")
        if not self.lower < self.upper:
            raise ConfigError(
                f"{self.name}: lower bound must be strictly below upper "
                f"({self.lower} vs {self.upper})"
            )


@dataclass(frozen=True)
class ParameterSpace:
    """Ordered collection of parameters; the order defines column index k."""

    params: tuple

    def __init__(self, params):
        object.__setattr__(self, "params", tuple(params))
        if len(self.params) < 1:
            raise ConfigError("a parameter space needs at least one parameter")
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate parameter names: {sorted(names)}")

    @property
    def k(self):
        return len(self.params)

    @property
    def names(self):
        return [p.name for p in self.params]

    @property
    def lowers(self):
        return np.array([p.lower for p in self.params])

    @property
    def uppers(self):
        return np.array([p.upper for p in self.params])

    def index_of(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise ConfigError(f"unknown parameter {name!r}") from None

    @classmethod
    def from_bounds(cls, names, lowers, uppers):
        return cls([ParameterDef(n, float(lo), float(up))
                    for n, lo, up in zip(names, lowers, uppers)])

    @classmethod
    def unit(cls, k, prefix="x"):
        """Unit hypercube with K auto-named parameters (x1..xK)."""
        return cls([ParameterDef(f"{prefix}{i + 1}", 0.0, 1.0) for i in range(k)])


def map_unit_to_range(space, unit):
    """Affine map of unit-cube samples into model units, column by column.

    out[i, k] = lower_k + (upper_k - lower_k) * unit[i, k]
    """
    unit = np.asarray(unit, dtype=float)
    if unit.ndim != 2 or unit.shape[1] != space.k:
        raise StructuralError(
            f"expected an N x {space.k} matrix, got shape {unit.shape}"
        )
    if unit.size and (np.nanmin(unit) < 0.0 or np.nanmax(unit) > 1.0):
        raise DomainError("unit-cube entries must lie in [0, 1]")
    if np.isnan(unit).any():
        raise DomainError("unit-cube entries must not be NaN")
    lo, up = space.lowers, space.uppers
    return lo + (up - lo) * unit


def map_range_to_unit(space, mapped):
    """Inverse affine map back to the unit cube (exact up to rounding)."""
    mapped = np.asarray(mapped, dtype=float)
    if mapped.ndim != 2 or mapped.shape[1] != space.k:
        raise StructuralError(
            f"expected an N x {space.k} matrix, got shape {mapped.shape}"
        )
    lo, up = space.lowers, space.uppers
    return (mapped - lo) / (up - lo)
