"""Bundled evaluation targets: analytic benchmark functions with known
sensitivity indices, and a six-parameter daily catchment simulator."""

from .analytic import (AnalyticFn, Ishigami, LinearFn, SobolG, analytic_sobol,
                       eval_analytic, make_function)
from .forcing import Forcing, read_forcing_csv, synthetic_forcing, write_forcing_csv
from .gr6j import (GR6J_OUTPUT_NAMES, GR6J_SPACE, Gr6jParams, Gr6jState,
                   gr6j_run, gr6j_run_batch, gr6j_step)
from .metrics import kge, nse

__all__ = [
    "AnalyticFn", "LinearFn", "Ishigami", "SobolG", "analytic_sobol",
    "eval_analytic", "make_function",
    "Forcing", "synthetic_forcing", "read_forcing_csv", "write_forcing_csv",
    "Gr6jParams", "Gr6jState", "GR6J_SPACE", "GR6J_OUTPUT_NAMES",
    "gr6j_step", "gr6j_run", "gr6j_run_batch",
    "kge", "nse",
]
