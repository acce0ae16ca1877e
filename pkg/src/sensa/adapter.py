"""Run external simulators over a design via a CSV-over-stdin/stdout
subprocess protocol.

Per row, the child process receives a two-line CSV on standard input (header
= the parameter order, one data row at full decimal precision, '.' decimal
separator, '\\n' line ends) and must emit a two-line CSV (header = the output
names, one data row). A nonzero exit, a timeout, or malformed output masks
that row invalid; everything else keeps running. The environment passes
through unchanged plus SENSA_ROW_INDEX for child-side logging.

Exogenous forcing series are the child's responsibility; the protocol
carries only the parameters.
"""

import csv
import io
import logging
import os
import shutil
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import OutputMatrix
from .errors import BatchQualityError, ConfigError, SetupError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimulatorSpec:
    command: tuple                 # executable plus fixed arguments
    param_order: tuple             # column contract, a permutation of the space
    output_names: tuple
    timeout_sec: float = 60.0
    max_parallel: int = 1
    per_batch: bool = False        # one child for the whole design
    max_fail_fraction: float = 0.5

    def __init__(self, command, param_order, output_names, timeout_sec=60.0,
                 max_parallel=1, per_batch=False, max_fail_fraction=0.5):
        object.__setattr__(self, "command", tuple(command))
        object.__setattr__(self, "param_order", tuple(param_order))
        object.__setattr__(self, "output_names", tuple(output_names))
        object.__setattr__(self, "timeout_sec", float(timeout_sec))
        object.__setattr__(self, "max_parallel", int(max_parallel))
        object.__setattr__(self, "per_batch", bool(per_batch))
        object.__setattr__(self, "max_fail_fraction", float(max_fail_fraction))
        if not self.command:
            raise ConfigError("simulator command must not be empty")
        if self.max_parallel < 1:
            raise ConfigError("max_parallel must be at least 1")
        if not self.output_names:
            raise ConfigError("declare at least one output name")


def _csv_block(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([f"{v:.17g}" for v in row])
    return buf.getvalue()


def _parse_block(text, expected_names, expected_rows):
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != expected_names:
        raise ValueError(f"bad output header {header!r}")
    rows = [row for row in reader if row]
    if len(rows) != expected_rows:
        raise ValueError(f"expected {expected_rows} data rows, got {len(rows)}")
    return np.array([[float(v) for v in row] for row in rows], dtype=float)


def _ordered_columns(spec, design):
    names = design.space.names
    if set(spec.param_order) != set(names):
        raise ConfigError(
            f"param_order {spec.param_order} does not cover the space {names}")
    cols = [names.index(p) for p in spec.param_order]
    return design.mapped[:, cols]


def run_batch(spec, design):
    """Run the external simulator once per design row (or once per batch).

    Returns an OutputMatrix whose row order equals the design order
    regardless of worker scheduling. Raises BatchQualityError when more than
    max_fail_fraction of the rows failed.
    """
    exe = spec.command[0]
    if shutil.which(exe) is None and not os.path.exists(exe):
        raise SetupError(f"simulator executable {exe!r} not found")
    mapped = _ordered_columns(spec, design)
    if not np.isfinite(mapped).all():
        raise ConfigError("design contains non-finite mapped values")
    n = design.n
    p = len(spec.output_names)
    values = np.full((n, p), np.nan)
    valid = np.zeros(n, dtype=bool)

    if spec.per_batch:
        payload = _csv_block(spec.param_order, mapped)
        try:
            proc = subprocess.run(list(spec.command), input=payload,
                                  capture_output=True, text=True,
                                  timeout=spec.timeout_sec,
                                  env={**os.environ, "SENSA_ROW_INDEX": "-1"})
            if proc.returncode == 0:
                values[:] = _parse_block(proc.stdout, spec.output_names, n)
                valid[:] = True
            else:
                log.warning("batch child exited %d: %s", proc.returncode,
                            proc.stderr.strip()[:500])
        except subprocess.TimeoutExpired:
            log.warning("batch child timed out after %.1fs", spec.timeout_sec)
        except ValueError as exc:
            log.warning("batch child output malformed: %s", exc)
    else:
        def run_row(i):
            payload = _csv_block(spec.param_order, [mapped[i]])
            env = {**os.environ, "SENSA_ROW_INDEX": str(i)}
            try:
                proc = subprocess.run(list(spec.command), input=payload,
                                      capture_output=True, text=True,
                                      timeout=spec.timeout_sec, env=env)
            except subprocess.TimeoutExpired:
                log.warning("row %d timed out after %.1fs", i, spec.timeout_sec)
                return
            if proc.returncode != 0:
                log.warning("row %d child exited %d", i, proc.returncode)
                return
            try:
                values[i] = _parse_block(proc.stdout, spec.output_names, 1)[0]
                valid[i] = True
            except ValueError as exc:
                log.warning("row %d output malformed: %s", i, exc)

        if spec.max_parallel > 1:
            with ThreadPoolExecutor(max_workers=spec.max_parallel) as pool:
                list(pool.map(run_row, range(n)))
        else:
            for i in range(n):
                run_row(i)

    failed = n - int(valid.sum())
    if failed > spec.max_fail_fraction * n:
        raise BatchQualityError(
            f"{failed}/{n} simulator rows failed "
            f"(threshold {spec.max_fail_fraction:.0%})")
    if failed:
        log.info("%d of %d simulator rows masked invalid", failed, n)
    return OutputMatrix(values, spec.output_names, valid)
