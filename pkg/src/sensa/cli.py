"""Command-line workflow driver.

Subcommands mirror the pipeline stages:

    sensa sample  --config study.json
    sensa run     --config study.json [--jobs 8]
    sensa analyze --config study.json [--n-ladder 1000,3000,10000]
    sensa compare --config study.json [--spearman]
    sensa report  --config study.json
    sensa tvsa    --config study.json --dates 2015-01-15,2015-07-15

Exit codes: 0 success, 2 configuration error, 3 data error, 4 child-process
batch failure.
"""

import argparse
import logging
import sys

import numpy as np
from scipy.stats import spearmanr

from . import study
from .errors import (BatchQualityError, ConfigError, DataError, SensaError,
                     SetupError)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_BATCH = 4


def _load_config(args):
    cfg = study.StudyConfig.load(args.config)
    if args.seed is not None:
        cfg = study.StudyConfig(dict(cfg.raw, seed=args.seed))
    return cfg.validated()


def _ladder_budgets(cfg, rung):
    """Scale each method's budget knob to roughly `rung` simulator runs."""
    k = cfg.space().k
    methods = {}
    for name, m in cfg.methods.items():
        m = dict(m)
        if name == "sobol":
            m["base_n"] = max(4, rung // (k + 2))
        elif name == "morris":
            m["r"] = max(2, rung // (k + 1))
        elif name == "vars":
            g = int(round(1.0 / float(m.get("h", 0.1))))
            m["centers"] = max(2, rung // (1 + k * g))
        methods[name] = m
    return study.StudyConfig(dict(cfg.raw, methods=methods, n=rung))


def cmd_ladder(cfg, rungs, jobs):
    """Repeat the analysis at several budgets and report rank stability.

    For each method, reports the Spearman correlation of its primary scaled
    measure between consecutive rungs and against the largest rung.
    """
    space = cfg.space()
    per_rung = {}
    for rung in rungs:
        rcfg = _ladder_budgets(cfg, rung)
        scaled = {}
        done_groups = {}
        for method in study.METHODS:
            if method not in rcfg.methods:
                continue
            group = study._design_group_for(method)
            if group not in done_groups:
                design = study.build_design(rcfg, group)
                outputs = study.evaluate_target(rcfg, design, jobs=jobs)
                done_groups[group] = (design, outputs)
            design, outputs = done_groups[group]
            column = study._analysis_columns(rcfg, outputs)[0]
            analyzer = study.analyze_method(rcfg, method, design, outputs, column)
            res = analyzer.results().get(study.PRIMARY_MEASURE[method])
            if res is not None:
                scaled[method] = res.scaled
        per_rung[rung] = scaled
    rows = []
    last = rungs[-1]
    for method in study.METHODS:
        if method not in cfg.methods:
            continue
        for i, rung in enumerate(rungs):
            if method not in per_rung[rung]:
                continue
            cur = per_rung[rung][method]
            prev_r = rungs[i - 1] if i else None
            rho_prev = (spearmanr(per_rung[prev_r][method], cur).statistic
                        if prev_r and method in per_rung[prev_r] else np.nan)
            rho_last = (spearmanr(per_rung[last][method], cur).statistic
                        if method in per_rung[last] else np.nan)
            rows.append([method, str(rung),
                         study._fmt(rho_prev), study._fmt(rho_last)]
                        + [study._fmt(v) for v in cur])
    import os
    os.makedirs(cfg.report_dir, exist_ok=True)
    path = os.path.join(cfg.report_dir, "ladder_stability.csv")
    study._write_csv(path, ["method", "n", "spearman_vs_prev", "spearman_vs_last"]
                     + space.names, rows)
    log.info("wrote %s", path)
    return path


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="sensa",
        description="Global sensitivity analysis workflow: sample a design, "
                    "run the target, analyze, compare methods, and report.")
    parser.add_argument("--log-level", default="INFO")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="study config JSON")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker pool size for target evaluation")
        return p

    add("sample", "generate the space-filling designs")
    add("run", "run the target over the sampled designs")
    p_analyze = add("analyze", "compute sensitivity measures")
    p_analyze.add_argument("--n-ladder", default=None,
                           help="comma-separated budgets; repeats the analysis "
                                "per rung and reports rank stability")
    p_compare = add("compare", "rank concordance across methods")
    p_compare.add_argument("--spearman", action="store_true",
                           help="pairwise Spearman instead of Pearson")
    p_compare.add_argument("--output", default=None,
                           help="restrict to one output column")
    add("report", "emit summary tables and plot-data files")
    p_tvsa = add("tvsa", "time-varying sensitivity analysis")
    p_tvsa.add_argument("--dates", required=True,
                        help="comma-separated ISO dates to analyze")

    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load_config(args)
        if args.command == "sample":
            study.cmd_sample(cfg)
        elif args.command == "run":
            study.cmd_run(cfg, jobs=args.jobs)
        elif args.command == "analyze":
            if args.n_ladder:
                rungs = [int(v) for v in args.n_ladder.split(",") if v]
                if not rungs:
                    raise ConfigError("--n-ladder needs at least one budget")
                cmd_ladder(cfg, rungs, jobs=args.jobs)
            else:
                study.cmd_analyze(cfg)
        elif args.command == "compare":
            corr = "spearman" if args.spearman else "pearson"
            study.cmd_compare(cfg, column=args.output, correlation=corr)
        elif args.command == "report":
            study.cmd_report(cfg)
        elif args.command == "tvsa":
            dates = [d for d in args.dates.split(",") if d]
            study.cmd_tvsa(cfg, dates, jobs=args.jobs)
    except (BatchQualityError, SetupError) as exc:
        log.error("%s", exc)
        return EXIT_BATCH
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except DataError as exc:
        log.error("%s", exc)
        return EXIT_DATA
    except SensaError as exc:
        log.error("%s", exc)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
