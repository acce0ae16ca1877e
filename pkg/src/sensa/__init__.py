"""sensa: global sensitivity analysis toolkit.

Seven GSA methods (Morris elementary effects, Sobol' first/total indices,
variogram-based VARS-TO, and four regression-based measures) over shared
space-filling designs, with cross-method concordance, an external-simulator
adapter, bundled benchmark targets, and a workflow CLI.
"""

from .compare import RankingTable, kendalls_w, pairwise_pearson, pairwise_spearman
from .data import DesignMatrix, OutputMatrix, filter_outputs, log_transform_output
from .morris import ElementaryEffects, MorrisAnalyzer, elementary_effects
from .regress import (GprAnalyzer, RandomForestAnalyzer, RegressionTreeAnalyzer,
                      SrcRegression, fit_gpr, fit_random_forest,
                      fit_regression_tree, ols_src)
from .results import Measure, SensitivityResult, scale_to_unit_sum
from .sampling import (LhsConfig, MorrisDesignConfig, SobolBlockConfig,
                       VarsStarConfig, append_batch, lhs_maximin, lhs_prefix,
                       morris_oat, sobol_blocks, vars_stars)
from .sobol import SobolAnalyzer, dummy_cutoffs, sobol_indices
from .space import ParameterDef, ParameterSpace, map_unit_to_range
from .variogram import VarsAnalyzer, directional_variogram, ivars, vars_to

__version__ = "0.1.0"

__all__ = [
    "Measure", "SensitivityResult", "scale_to_unit_sum",
    "ParameterDef", "ParameterSpace", "map_unit_to_range",
    "DesignMatrix", "OutputMatrix", "filter_outputs", "log_transform_output",
    "LhsConfig", "MorrisDesignConfig", "SobolBlockConfig", "VarsStarConfig",
    "lhs_maximin", "lhs_prefix", "append_batch", "morris_oat", "sobol_blocks",
    "vars_stars",
    "MorrisAnalyzer", "ElementaryEffects", "elementary_effects",
    "SobolAnalyzer", "sobol_indices", "dummy_cutoffs",
    "VarsAnalyzer", "directional_variogram", "vars_to", "ivars",
    "SrcRegression", "ols_src", "RegressionTreeAnalyzer", "fit_regression_tree",
    "RandomForestAnalyzer", "fit_random_forest", "GprAnalyzer", "fit_gpr",
    "RankingTable", "kendalls_w", "pairwise_pearson", "pairwise_spearman",
]
