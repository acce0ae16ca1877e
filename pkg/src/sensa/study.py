"""File-in/file-out workflow stages behind the CLI:

    sample -> run -> analyze -> compare -> report        (plus tvsa)

Every stage writes CSV plus a JSON sidecar carrying the study's config hash,
the seed, and stage metadata. A stage validates its inputs' hashes before
using them, so stale mixtures of configurations fail loudly instead of
silently producing nonsense. All randomness derives from the single
mandatory seed, which makes every emitted byte a function of (config, seed).
"""

import csv
import hashlib
import json
import logging
import os
from dataclasses import dataclass

import numpy as np

from . import adapter
from .compare import RankingTable, kendalls_w, pairwise_correlation
from .data import DesignMatrix, LhsKind, MorrisOatKind, OutputMatrix, SobolBlocksKind, VarsStarsKind
from .errors import ConfigError, NoDataError, StalePipelineError
from .morris import MorrisAnalyzer
from .regress import (GprAnalyzer, RandomForestAnalyzer, RegressionTreeAnalyzer,
                      SrcRegression)
from .results import Measure
from .sampling import (LhsConfig, MorrisDesignConfig, SobolBlockConfig,
                       VarsStarConfig, lhs_maximin, morris_oat, sobol_blocks,
                       vars_stars)
from .sobol import SobolAnalyzer
from .space import ParameterDef, ParameterSpace
from .testbed import (GR6J_OUTPUT_NAMES, eval_analytic, gr6j_run_batch, kge,
                      make_function, read_forcing_csv, synthetic_forcing)
from .variogram import VarsAnalyzer
from .data import filter_outputs, log_transform_output

log = logging.getLogger(__name__)

METHODS = ("morris", "sobol", "vars", "src", "tree", "forest", "gpr")
REGRESSION_METHODS = ("src", "tree", "forest", "gpr")
DESIGN_GROUPS = ("morris", "sobol", "vars", "lhs")

# which measure represents each method in cross-method tables (the same
# convention as the published summary tables)
PRIMARY_MEASURE = {
    "morris": Measure.MORRIS_DGSM,
    "sobol": Measure.SOBOL_T,
    "vars": Measure.VARS_TO,
    "src": Measure.REG_SRC,
    "tree": Measure.TREE_IMPORTANCE,
    "forest": Measure.FOREST_PERMUTATION,
    "gpr": Measure.GPR_SLOPE,
}

# measures that join the concordance table as extra columns, mirroring the
# two-column treatment the GPR gets in published summary tables
EXTRA_COMPARE_MEASURES = {"gpr": (Measure.GPR_INV_RANGE,)}

_SEED_ROLE = {"morris": 1, "sobol": 2, "vars": 3, "lhs": 4,
              "sobol_boot": 5, "forest": 6, "gpr": 7, "forcing": 8}


def derive_seed(seed, role):
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(_SEED_ROLE[role],))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class StudyConfig:
    raw: dict

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls(raw)

    def validated(self):
        if "seed" not in self.raw:
            raise ConfigError("config must carry an explicit seed")
        if not self.raw.get("methods"):
            raise ConfigError("config must select at least one method")
        unknown = set(self.raw["methods"]) - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown method names {sorted(unknown)}")
        self.space()
        self.target_kind()
        return self

    @property
    def seed(self):
        return int(self.raw["seed"])

    @property
    def report_dir(self):
        return self.raw.get("report_dir", "sensa_report")

    @property
    def methods(self):
        return dict(self.raw["methods"])

    def space(self):
        spec = self.raw.get("space")
        if not spec:
            raise ConfigError("config must define the parameter space")
        return ParameterSpace([ParameterDef(p["name"], float(p["lower"]),
                                            float(p["upper"])) for p in spec])

    def target_kind(self):
        kind = self.raw.get("target", {}).get("kind")
        if kind not in ("builtin", "gr6j", "external"):
            raise ConfigError(f"unknown target kind {kind!r}")
        return kind

    def config_hash(self):
        # the output directory is not part of the study identity
        ident = {k: v for k, v in self.raw.items() if k != "report_dir"}
        blob = json.dumps(ident, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def design_groups(self):
        groups = []
        for m in ("morris", "sobol", "vars"):
            if m in self.raw["methods"]:
                groups.append(m)
        if any(m in self.raw["methods"] for m in REGRESSION_METHODS):
            groups.append("lhs")
        return groups


def _fmt(v):
    return f"{float(v):.17g}"


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader if row]
    return header, rows


def _write_sidecar(path, cfg, extra):
    payload = {"config_hash": cfg.config_hash(), "seed": cfg.seed, **extra}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _read_sidecar(path, cfg, what):
    if not os.path.exists(path):
        raise StalePipelineError(f"missing {what} sidecar {path}; run the "
                                 "earlier stage first")
    with open(path) as fh:
        meta = json.load(fh)
    if meta.get("config_hash") != cfg.config_hash():
        raise StalePipelineError(
            f"{what} at {path} was produced under a different configuration; "
            "re-run the pipeline from the sample stage")
    return meta


def _design_paths(outdir, group):
    base = os.path.join(outdir, f"design_{group}")
    return base + ".csv", base + ".unit.csv", base + ".meta.json"


def _outputs_paths(outdir, group):
    base = os.path.join(outdir, f"outputs_{group}")
    return base + ".csv", base + ".meta.json"


def _results_paths(outdir, method):
    base = os.path.join(outdir, f"results_{method}")
    return base + ".csv", base + ".meta.json"


# ---------------------------------------------------------------- sample --

def build_design(cfg, group):
    space = cfg.space()
    methods = cfg.methods
    seed = derive_seed(cfg.seed, group)
    if group == "morris":
        m = methods["morris"]
        dcfg = MorrisDesignConfig(r=int(m.get("r", 200)),
                                  levels=int(m.get("levels", 20)),
                                  delta=m.get("delta"))
        return morris_oat(space, dcfg, seed)
    if group == "sobol":
        m = methods["sobol"]
        dcfg = SobolBlockConfig(base_n=int(m.get("base_n", 4096)),
                                rule=m.get("rule", "lhs"))
        return sobol_blocks(space, dcfg, seed)
    if group == "vars":
        m = methods["vars"]
        dcfg = VarsStarConfig(centers=int(m.get("centers", 50)),
                              h=float(m.get("h", 0.1)))
        return vars_stars(space, dcfg, seed)
    if group == "lhs":
        n = int(cfg.raw.get("n", 2000))
        sweeps = int(cfg.raw.get("maximin_sweeps", 0))
        return lhs_maximin(space, LhsConfig(n=n, seed=seed, maximin_sweeps=sweeps))
    raise ConfigError(f"unknown design group {group}")


def _kind_meta(design):
    kind = design.kind
    meta = {"kind": type(kind).__name__}
    if isinstance(kind, LhsKind):
        meta.update(n=kind.n, maximin_sweeps=kind.maximin_sweeps,
                    oversample_total=kind.oversample_total,
                    approx_strata=kind.approx_strata)
    elif isinstance(kind, MorrisOatKind):
        meta.update(r=kind.r, levels=kind.levels, delta=kind.delta,
                    trajectory=kind.trajectory, step_param=kind.step_param,
                    step_delta=kind.step_delta)
    elif isinstance(kind, SobolBlocksKind):
        meta.update(base_n=kind.base_n, rule=kind.rule)
    elif isinstance(kind, VarsStarsKind):
        meta.update(centers=kind.centers, h=kind.h, star=kind.star,
                    dim=kind.dim, grid_pos=kind.grid_pos,
                    center_grid=kind.center_grid)
    return meta


def _kind_from_meta(meta):
    name = meta["kind"]
    if name == "LhsKind":
        return LhsKind(n=meta["n"], maximin_sweeps=meta["maximin_sweeps"],
                       oversample_total=meta["oversample_total"],
                       approx_strata=meta["approx_strata"])
    if name == "MorrisOatKind":
        return MorrisOatKind(r=meta["r"], levels=meta["levels"],
                             delta=meta["delta"],
                             trajectory=np.array(meta["trajectory"]),
                             step_param=np.array(meta["step_param"]),
                             step_delta=np.array(meta["step_delta"]))
    if name == "SobolBlocksKind":
        return SobolBlocksKind(base_n=meta["base_n"], rule=meta["rule"])
    if name == "VarsStarsKind":
        return VarsStarsKind(centers=meta["centers"], h=meta["h"],
                             star=np.array(meta["star"]),
                             dim=np.array(meta["dim"]),
                             grid_pos=np.array(meta["grid_pos"]),
                             center_grid=np.array(meta["center_grid"]))
    raise StalePipelineError(f"unknown design kind {name} in sidecar")


def cmd_sample(cfg):
    """Generate and persist every design the selected methods need."""
    cfg.validated()
    outdir = cfg.report_dir
    os.makedirs(outdir, exist_ok=True)
    space = cfg.space()
    written = []
    for group in cfg.design_groups():
        design = build_design(cfg, group)
        mapped_path, unit_path, meta_path = _design_paths(outdir, group)
        _write_csv(mapped_path, space.names,
                   [[_fmt(v) for v in row] for row in design.mapped])
        _write_csv(unit_path, space.names,
                   [[_fmt(v) for v in row] for row in design.unit])
        _write_sidecar(meta_path, cfg,
                       {"stage": "sample", "group": group,
                        "design_seed": design.seed, "n_rows": design.n,
                        **_kind_meta(design)})
        written.append(mapped_path)
        log.info("wrote %s (%d rows)", mapped_path, design.n)
    return written


def load_design(cfg, group):
    outdir = cfg.report_dir
    _, unit_path, meta_path = _design_paths(outdir, group)
    meta = _read_sidecar(meta_path, cfg, f"design[{group}]")
    header, rows = _read_csv(unit_path)
    space = cfg.space()
    if header != space.names:
        raise StalePipelineError(f"{unit_path}: columns {header} do not match "
                                 f"the configured space {space.names}")
    unit = np.array([[float(v) for v in row] for row in rows])
    return DesignMatrix(space, unit, _kind_from_meta(meta), meta["design_seed"])


# ------------------------------------------------------------------- run --

def _resolve_forcing(cfg):
    target = cfg.raw["target"]
    forcing_spec = target.get("forcing")
    if forcing_spec is None:
        raise ConfigError("gr6j target needs a forcing entry")
    if isinstance(forcing_spec, dict) and "synthetic" in forcing_spec:
        syn = forcing_spec["synthetic"]
        return synthetic_forcing(int(syn["days"]),
                                 seed=int(syn.get("seed",
                                                  derive_seed(cfg.seed, "forcing"))),
                                 start=syn.get("start", "2014-01-01"))
    return read_forcing_csv(forcing_spec)


def _gr6j_output_plan(cfg, forcing):
    """(column names, series to record, day indices, kge window or None)."""
    target = cfg.raw["target"]
    warmup = int(target.get("warmup_days", 365))
    names, series_days = [], []
    for spec in target.get("outputs", [{"series": "Qsim", "date": None}]):
        series = spec.get("series", "Qsim")
        if series not in GR6J_OUTPUT_NAMES:
            raise ConfigError(f"unknown gr6j series {series!r}")
        if spec.get("date") is not None:
            day = forcing.index_of(spec["date"])
            label = f"{series}@{spec['date']}"
        else:
            day = forcing.n_days - 1
            label = f"{series}@end"
        if day < warmup:
            raise ConfigError(f"output day for {label} falls inside the warmup")
        names.append(label)
        series_days.append((series, day))
    kge_spec = target.get("kge")
    if kge_spec:
        names.append("KGE")
    return names, series_days, warmup, kge_spec


def _evaluate_gr6j(cfg, design, jobs):
    space = design.space
    if set(space.names) != set(GR6J_SPACE_NAMES):
        raise ConfigError(f"gr6j target needs parameters {GR6J_SPACE_NAMES}")
    cols = [space.names.index(n) for n in GR6J_SPACE_NAMES]
    params = design.mapped[:, cols]
    forcing = _resolve_forcing(cfg)
    names, series_days, warmup, kge_spec = _gr6j_output_plan(cfg, forcing)
    record = sorted({s for s, _ in series_days})
    days = sorted({d for _, d in series_days})
    kge_days = []
    if kge_spec:
        start = forcing.index_of(kge_spec["window"][0])
        stop = forcing.index_of(kge_spec["window"][1])
        if stop < start or start < warmup:
            raise ConfigError("kge window must be ordered and past the warmup")
        kge_days = list(range(start, stop + 1))
        record = sorted(set(record) | {"Qsim"})
        days = sorted(set(days) | set(kge_days))
    batch = gr6j_run_batch(params, forcing, record=tuple(record) or ("Qsim",),
                           days=np.array(days, dtype=int),
                           warmup_days=warmup, jobs=jobs)
    day_slot = {d: i for i, d in enumerate(days)}
    columns = []
    for (series, day), label in zip(series_days, names):
        columns.append(batch[series][:, day_slot[day]])
    if kge_spec:
        obs = _load_obs_series(kge_spec["obs"], forcing, kge_days)
        sim_win = batch["Qsim"][:, [day_slot[d] for d in kge_days]]
        kge_col = np.array([kge(sim_win[i], obs) for i in range(sim_win.shape[0])])
        columns.append(kge_col)
    return OutputMatrix(np.column_stack(columns), names)


def _load_obs_series(path, forcing, day_indices):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["date", "value"]:
            raise ConfigError(f"{path}: expected header date,value")
        by_date = {row[0]: float(row[1]) for row in reader if row}
    try:
        return np.array([by_date[forcing.dates[d]] for d in day_indices])
    except KeyError as exc:
        raise ConfigError(f"{path}: missing observation for {exc}") from None


GR6J_SPACE_NAMES = ("X1", "X2", "X3", "X4", "X5", "X6")


def evaluate_target(cfg, design, jobs=1):
    """Run the configured target over a design, in design row order."""
    kind = cfg.target_kind()
    target = cfg.raw["target"]
    if kind == "builtin":
        kwargs = {k: v for k, v in target.items() if k not in ("kind", "name")}
        fn = make_function(target["name"], **kwargs)
        if design.k != fn.k:
            raise ConfigError(f"target {target['name']} expects K={fn.k}")
        if jobs > 1 and design.n >= 2 * jobs:
            values = np.empty(design.n)
            bounds = np.linspace(0, design.n, jobs + 1).astype(int)
            from concurrent.futures import ThreadPoolExecutor
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                def chunk(i):
                    lo, hi = bounds[i], bounds[i + 1]
                    values[lo:hi] = eval_analytic(fn, design.unit[lo:hi])
                list(pool.map(chunk, range(jobs)))
        else:
            values = eval_analytic(fn, design.unit)
        return OutputMatrix(values[:, None], ("y",))
    if kind == "gr6j":
        return _evaluate_gr6j(cfg, design, jobs)
    if kind == "external":
        spec = adapter.SimulatorSpec(
            command=target["command"],
            param_order=target.get("param_order", cfg.space().names),
            output_names=target["output_names"],
            timeout_sec=target.get("timeout_sec", 60.0),
            max_parallel=max(jobs, int(target.get("max_parallel", 1))),
            per_batch=target.get("per_batch", False),
            max_fail_fraction=target.get("max_fail_fraction", 0.5))
        return adapter.run_batch(spec, design)
    raise ConfigError(f"unknown target kind {kind!r}")


def cmd_run(cfg, jobs=1):
    """Evaluate the target over every sampled design and persist outputs."""
    cfg.validated()
    outdir = cfg.report_dir
    written = []
    for group in cfg.design_groups():
        design = load_design(cfg, group)
        out = evaluate_target(cfg, design, jobs=jobs)
        out_path, meta_path = _outputs_paths(outdir, group)
        _write_csv(out_path, list(out.output_names),
                   [[_fmt(v) for v in row] for row in out.values])
        _write_sidecar(meta_path, cfg,
                       {"stage": "run", "group": group,
                        "valid": out.valid.astype(int),
                        "n_valid": out.n_valid()})
        written.append(out_path)
        log.info("wrote %s (%d/%d valid rows)", out_path, out.n_valid(), out.n)
    return written


def load_outputs(cfg, group):
    out_path, meta_path = _outputs_paths(cfg.report_dir, group)
    meta = _read_sidecar(meta_path, cfg, f"outputs[{group}]")
    header, rows = _read_csv(out_path)
    values = np.array([[float(v) for v in row] for row in rows])
    valid = np.array(meta["valid"], dtype=bool)
    return OutputMatrix(values, tuple(header), valid)


# --------------------------------------------------------------- analyze --

def _apply_filters_and_transforms(cfg, outputs):
    for rule in cfg.raw.get("filters", []):
        col = outputs.column_index(rule["output"])
        lo = rule.get("min")
        hi = rule.get("max")

        def pred(row, col=col, lo=lo, hi=hi):
            v = row[col]
            return (lo is None or v >= lo) and (hi is None or v <= hi)

        outputs = filter_outputs(outputs, pred)
    for spec in cfg.raw.get("outputs", []):
        if spec.get("log"):
            outputs = log_transform_output(outputs, spec["name"])
    return outputs


def _analysis_columns(cfg, outputs):
    wanted = [spec["name"] for spec in cfg.raw.get("outputs", [])]
    if not wanted:
        return list(outputs.output_names)
    missing = [w for w in wanted if w not in outputs.output_names]
    if missing:
        raise ConfigError(f"configured outputs {missing} not produced by the target")
    return wanted


def make_analyzer(cfg, method, column):
    m = cfg.methods.get(method, {})
    if method == "morris":
        return MorrisAnalyzer(column=column)
    if method == "sobol":
        return SobolAnalyzer(column=column,
                             boot_reps=int(m.get("boot_reps", 1000)),
                             seed=derive_seed(cfg.seed, "sobol_boot"),
                             with_dummy=m.get("with_dummy", True))
    if method == "vars":
        return VarsAnalyzer(column=column)
    if method == "src":
        return SrcRegression(column=column, quadratic=m.get("quadratic", False))
    if method == "tree":
        return RegressionTreeAnalyzer(column=column,
                                      min_node_size=int(m.get("min_node_size", 20)),
                                      min_improve=float(m.get("min_improve", 0.01)))
    if method == "forest":
        return RandomForestAnalyzer(column=column, b=int(m.get("b", 500)),
                                    mtry=m.get("mtry"),
                                    min_node_size=int(m.get("min_node_size", 5)),
                                    seed=derive_seed(cfg.seed, "forest"))
    if method == "gpr":
        return GprAnalyzer(column=column, max_n=int(m.get("max_n", 500)),
                           alpha_exp=float(m.get("alpha_exp", 1.9)),
                           restarts=int(m.get("restarts", 8)),
                           seed=derive_seed(cfg.seed, "gpr"))
    raise ConfigError(f"unknown method {method!r}")


def _design_group_for(method):
    return method if method in ("morris", "sobol", "vars") else "lhs"


def analyze_method(cfg, method, design, outputs, column):
    analyzer = make_analyzer(cfg, method, column)
    analyzer.fit(design, outputs)
    return analyzer


def cmd_analyze(cfg):
    """Fit every configured method on its design/outputs and persist results.

    Result CSVs are long format: one row per (output, measure, parameter).
    """
    cfg.validated()
    outdir = cfg.report_dir
    written = []
    loaded = {}
    for method in METHODS:
        if method not in cfg.methods:
            continue
        group = _design_group_for(method)
        if group not in loaded:
            design = load_design(cfg, group)
            outputs = _apply_filters_and_transforms(cfg, load_outputs(cfg, group))
            loaded[group] = (design, outputs)
        design, outputs = loaded[group]
        if outputs.n_valid() == 0:
            raise NoDataError(f"no valid rows remain for {method}")
        rows = []
        extras = {}
        for column in _analysis_columns(cfg, outputs):
            analyzer = analyze_method(cfg, method, design, outputs, column)
            for measure, res in sorted(analyzer.results().items(),
                                       key=lambda kv: str(kv[0])):
                ci = res.ci if res.ci is not None else np.full((res.k, 2), np.nan)
                for i, name in enumerate(res.names):
                    rows.append([column, str(measure), name,
                                 _fmt(res.raw[i]), _fmt(res.scaled[i]),
                                 _fmt(ci[i, 0]), _fmt(ci[i, 1])])
                extras[f"{column}/{measure}"] = {
                    k: v for k, v in res.extra.items()
                    if isinstance(v, (int, float, bool, str, type(None)))}
            extras[f"{column}/_analyzer"] = _analyzer_extras(analyzer)
        res_path, meta_path = _results_paths(outdir, method)
        _write_csv(res_path,
                   ["output", "measure", "param", "raw", "scaled", "ci_low", "ci_high"],
                   rows)
        _write_sidecar(meta_path, cfg, {"stage": "analyze", "method": method,
                                        "extras": extras})
        written.append(res_path)
        log.info("wrote %s", res_path)
    return written


def _analyzer_extras(analyzer):
    out = {}
    if isinstance(analyzer, MorrisAnalyzer):
        out["scatter"] = analyzer.scatter_table()
    if isinstance(analyzer, SobolAnalyzer):
        out["bars"] = analyzer.bar_table()
        out["dummy_s1"] = analyzer.indices_.dummy_s1
        out["dummy_t"] = analyzer.indices_.dummy_t
    if isinstance(analyzer, RegressionTreeAnalyzer):
        out["leaf_table"] = analyzer.tree_.leaf_table()
    if isinstance(analyzer, SrcRegression):
        out["r2"] = analyzer.r2_
        out["low_fit"] = bool(analyzer.fit_.low_fit)
    if isinstance(analyzer, RandomForestAnalyzer):
        out["oob_r2"] = analyzer.oob_r2_
    if isinstance(analyzer, GprAnalyzer):
        out["ranges"] = analyzer.ranges_.tolist()
        out["log_lik"] = analyzer.fit_.log_lik
    return out


def load_results(cfg, method):
    res_path, meta_path = _results_paths(cfg.report_dir, method)
    meta = _read_sidecar(meta_path, cfg, f"results[{method}]")
    header, rows = _read_csv(res_path)
    table = {}
    for output, measure, param, raw, scaled, lo, hi in rows:
        table.setdefault((output, measure), []).append(
            (param, float(raw), float(scaled), float(lo), float(hi)))
    return table, meta


# --------------------------------------------------------------- compare --

def build_ranking_table(cfg, column=None):
    """Collect each configured method's primary measure into one table."""
    cfg.validated()
    space = cfg.space()
    columns = {}
    for method in METHODS:
        if method not in cfg.methods:
            continue
        table, _ = load_results(cfg, method)
        wanted = [(method, PRIMARY_MEASURE[method])]
        wanted += [(f"{method}:{m}", m)
                   for m in EXTRA_COMPARE_MEASURES.get(method, ())]
        for label, measure in wanted:
            keys = [k for k in table if k[1] == str(measure)]
            if column is not None:
                keys = [k for k in keys if k[0] == column]
            if not keys:
                continue
            key = sorted(keys)[0]
            entries = {p: s for p, _, s, _, _ in table[key]}
            columns[label] = [entries[name] for name in space.names]
    if len(columns) < 2:
        raise ConfigError("need results from at least two methods to compare")
    scaled = np.column_stack([columns[m] for m in columns])
    return RankingTable.from_scaled(space.names, list(columns), scaled)


def cmd_compare(cfg, column=None, correlation="pearson"):
    """Rank concordance across methods: Kendall's W and pairwise correlation."""
    outdir = cfg.report_dir
    table = build_ranking_table(cfg, column=column)
    w, chi_sq, p = kendalls_w(table)
    corr = pairwise_correlation(table, method=correlation)
    table.write_csv(os.path.join(outdir, "ranking_table.csv"))
    _write_csv(os.path.join(outdir, "concordance_pairwise.csv"),
               ["method"] + list(table.methods),
               [[m] + [_fmt(v) for v in corr[i]]
                for i, m in enumerate(table.methods)])
    _write_sidecar(os.path.join(outdir, "concordance.json"), cfg,
                   {"stage": "compare", "kendalls_w": w, "chi_sq": chi_sq,
                    "p_value": p, "correlation": correlation,
                    "methods": list(table.methods)})
    log.info("Kendall's W = %.4f (chi2=%.2f, p=%.2g)", w, chi_sq, p)
    return w, chi_sq, p


# ---------------------------------------------------------------- report --

def cmd_report(cfg):
    """Summary tables and plot-data files from the analyze/compare stages."""
    cfg.validated()
    outdir = cfg.report_dir
    space = cfg.space()
    written = []

    # (a) per-method scaled importance, one column per measure
    header = ["param"]
    columns = []
    for method in METHODS:
        if method not in cfg.methods:
            continue
        table, meta = load_results(cfg, method)
        for (output, measure), entries in sorted(table.items()):
            header.append(f"{method}:{measure}:{output}")
            columns.append({p: s for p, _, s, _, _ in entries})
    rows = [[name] + [_fmt(col.get(name, np.nan)) for col in columns]
            for name in space.names]
    path = os.path.join(outdir, "summary_scaled.csv")
    _write_csv(path, header, rows)
    written.append(path)

    # (b) Morris scatter data
    if "morris" in cfg.methods:
        _, meta = load_results(cfg, "morris")
        rows = []
        for key, extras in meta["extras"].items():
            if key.endswith("/_analyzer") and "scatter" in extras:
                output = key.split("/")[0]
                rows += [[output, name, _fmt(ms), _fmt(sg)]
                         for name, ms, sg in extras["scatter"]]
        path = os.path.join(outdir, "morris_scatter.csv")
        _write_csv(path, ["output", "param", "mu_star", "sigma"], rows)
        written.append(path)

    # (c) Sobol' bars with CIs and cutoffs
    if "sobol" in cfg.methods:
        _, meta = load_results(cfg, "sobol")
        rows = []
        for key, extras in meta["extras"].items():
            if key.endswith("/_analyzer") and "bars" in extras:
                output = key.split("/")[0]
                ds1, dt = extras.get("dummy_s1"), extras.get("dummy_t")
                rows += [[output, name, _fmt(s1), _fmt(t), _fmt(a), _fmt(b),
                          _fmt(c), _fmt(d),
                          _fmt(ds1 if ds1 is not None else np.nan),
                          _fmt(dt if dt is not None else np.nan)]
                         for name, s1, t, a, b, c, d in extras["bars"]]
        path = os.path.join(outdir, "sobol_bars.csv")
        _write_csv(path, ["output", "param", "s1", "t", "s1_lo", "s1_hi",
                          "t_lo", "t_hi", "dummy_s1", "dummy_t"], rows)
        written.append(path)

    # (d)+(e) ranking heat table and concordance come from cmd_compare
    ranking = os.path.join(outdir, "ranking_table.csv")
    if os.path.exists(ranking):
        table = RankingTable.read_csv(ranking)
        path = os.path.join(outdir, "ranking_heat.csv")
        _write_csv(path, ["param"] + list(table.methods),
                   [[p] + [_fmt(v) for v in table.ranks[i]]
                    for i, p in enumerate(table.params)])
        written.append(path)

    # (f) regression-tree leaf assignments
    if "tree" in cfg.methods:
        _, meta = load_results(cfg, "tree")
        rows = []
        for key, extras in meta["extras"].items():
            if key.endswith("/_analyzer") and "leaf_table" in extras:
                output = key.split("/")[0]
                rows += [[output, str(i), str(leaf), _fmt(fit)]
                         for i, leaf, fit in extras["leaf_table"]]
        path = os.path.join(outdir, "tree_leaf_table.csv")
        _write_csv(path, ["output", "row", "leaf_id", "fitted"], rows)
        written.append(path)
    for p in written:
        log.info("wrote %s", p)
    return written


# ------------------------------------------------------------------ tvsa --

def cmd_tvsa(cfg, dates, jobs=1):
    """Time-varying SA: one analysis per date, plus a date x parameter matrix.

    Only meaningful for targets that emit time series (the bundled simulator);
    the configured methods run on each date's output column.
    """
    cfg.validated()
    if cfg.target_kind() != "gr6j":
        raise ConfigError("tvsa needs a time-series target (gr6j)")
    series = cfg.raw["target"].get("tvsa_series", "Qsim")
    tvsa_cfg = StudyConfig(dict(
        cfg.raw,
        target=dict(cfg.raw["target"],
                    outputs=[{"series": series, "date": d} for d in dates]),
        outputs=[],
    ))
    outdir = cfg.report_dir
    os.makedirs(outdir, exist_ok=True)
    matrix = {}
    method_order = [m for m in METHODS if m in cfg.methods]
    space = cfg.space()
    for group in tvsa_cfg.design_groups():
        design = build_design(tvsa_cfg, group)
        outputs = evaluate_target(tvsa_cfg, design, jobs=jobs)
        for method in method_order:
            if _design_group_for(method) != group:
                continue
            for date in dates:
                column = f"{series}@{date}"
                analyzer = analyze_method(tvsa_cfg, method, design, outputs, column)
                res = analyzer.results().get(PRIMARY_MEASURE[method])
                if res is not None:
                    matrix[(method, date)] = res.scaled
    rows = []
    for method in method_order:
        for date in dates:
            if (method, date) in matrix:
                rows.append([method, date] + [_fmt(v) for v in matrix[(method, date)]])
    path = os.path.join(outdir, "tvsa_matrix.csv")
    _write_csv(path, ["method", "date"] + space.names, rows)
    log.info("wrote %s", path)
    return path
