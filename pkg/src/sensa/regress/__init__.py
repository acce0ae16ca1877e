"""Regression-based sensitivity methods: OLS/SRC, CART importance,
random-forest dual importances, and GPR slopes plus inverse ranges."""

from .ols import OlsFit, SrcRegression, ols_src
from .tree import RegressionTreeAnalyzer, RegTree, fit_regression_tree
from .forest import ForestFit, RandomForestAnalyzer, fit_random_forest
from .gpr import GprAnalyzer, GprFit, fit_gpr

__all__ = [
    "OlsFit", "SrcRegression", "ols_src",
    "RegTree", "RegressionTreeAnalyzer", "fit_regression_tree",
    "ForestFit", "RandomForestAnalyzer", "fit_random_forest",
    "GprFit", "GprAnalyzer", "fit_gpr",
]
