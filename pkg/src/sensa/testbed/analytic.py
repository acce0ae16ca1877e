"""Analytic benchmark functions on the unit cube with closed-form Sobol'
indices, used as oracles for the Monte Carlo estimators."""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DegenerateInputError, DomainError


class AnalyticFn:
    """Deterministic test function on [0, 1]^K."""

    name = "base"

    def __call__(self, u):
        raise NotImplementedError

    def sobol_s1_t(self):
        """Closed-form (S1, T) vectors."""
        raise NotImplementedError


@dataclass(frozen=True)
class LinearFn(AnalyticFn):
    """f(u) = sum_k w_k u_k; purely additive, so S1 = T exactly."""

    weights: tuple

    name = "linear"

    @property
    def k(self):
        return len(self.weights)

    def __call__(self, u):
        return np.asarray(u) @ np.asarray(self.weights, dtype=float)

    def sobol_s1_t(self):
        w = np.asarray(self.weights, dtype=float)
        v = w**2 / 12.0
        if v.sum() <= 0:
            raise DegenerateInputError("all weights are zero")
        s1 = v / v.sum()
        return s1, s1.copy()


@dataclass(frozen=True)
class Ishigami(AnalyticFn):
    """Ishigami-Homma function, inputs mapped from [0,1] to [-pi, pi].

    f(z) = sin z1 + a sin^2 z2 + b z3^4 sin z1. The variance decomposition is
    V1 = (1 + b pi^4 / 5)^2 / 2, V2 = a^2 / 8, V13 = 8 b^2 pi^8 / 225, and z3
    acts only through its interaction with z1 (S1_3 = 0 exactly).
    """

    a: float = 7.0
    b: float = 0.1

    name = "ishigami"
    k = 3

    def __call__(self, u):
        z = np.pi * (2.0 * np.asarray(u) - 1.0)
        return (np.sin(z[:, 0]) + self.a * np.sin(z[:, 1]) ** 2
                + self.b * z[:, 2] ** 4 * np.sin(z[:, 0]))

    def sobol_s1_t(self):
        pi = np.pi
        v1 = 0.5 * (1.0 + self.b * pi**4 / 5.0) ** 2
        v2 = self.a**2 / 8.0
        v13 = 8.0 * self.b**2 * pi**8 / 225.0
        v = v1 + v2 + v13
        s1 = np.array([v1 / v, v2 / v, 0.0])
        t = np.array([(v1 + v13) / v, v2 / v, v13 / v])
        return s1, t


@dataclass(frozen=True)
class SobolG(AnalyticFn):
    """Sobol' G function: prod_k (|4 u_k - 2| + a_k) / (1 + a_k).

    Small a_k means an influential input; V_k = (1/3) / (1 + a_k)^2 and the
    total variance is prod (1 + V_k) - 1.
    """

    a: tuple

    name = "sobol_g"

    @property
    def k(self):
        return len(self.a)

    def __call__(self, u):
        u = np.asarray(u)
        a = np.asarray(self.a, dtype=float)
        return np.prod((np.abs(4.0 * u - 2.0) + a) / (1.0 + a), axis=1)

    def sobol_s1_t(self):
        a = np.asarray(self.a, dtype=float)
        vk = (1.0 / 3.0) / (1.0 + a) ** 2
        v = np.prod(1.0 + vk) - 1.0
        s1 = vk / v
        t = np.array([vk[j] * np.prod(1.0 + np.delete(vk, j)) / v
                      for j in range(len(a))])
        return s1, t


def eval_analytic(fn, points):
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise DomainError("points must form an N x K matrix")
    if points.size and (points.min() < 0.0 or points.max() > 1.0):
        raise DomainError("analytic functions are defined on the unit cube")
    return fn(points)


def analytic_sobol(fn):
    return fn.sobol_s1_t()


def make_function(name, **kwargs):
    """Registry used by the CLI's builtin targets."""
    name = name.lower()
    if name == "linear":
        return LinearFn(tuple(kwargs["weights"]))
    if name == "ishigami":
        return Ishigami(a=kwargs.get("a", 7.0), b=kwargs.get("b", 0.1))
    if name in ("sobol_g", "sobolg", "g"):
        return SobolG(tuple(kwargs["a"]))
    raise ConfigError(f"unknown builtin function {name!r}")
