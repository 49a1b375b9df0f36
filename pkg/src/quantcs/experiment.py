"""Sweep runner and aggregation for the synthetic benchmark grids.

A sweep varies the total bit budget M*B; at each budget every requested
solver mode runs on the *same* generated instance (paired trials), and one
CSV row is emitted per (mode, budget, trial).  Rows are flushed as trials
complete so an interrupted sweep loses at most the in-flight trial.  Apart
from the wall-time column the output is a deterministic function of the
configuration.
"""

from __future__ import annotations

import io
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .model import (
    MODE_COUPLED,
    MODE_MULTIBIT,
    MODE_ONEBIT,
    MODE_ORACLE,
    Problem,
    SolverConfig,
    problem_hash,
)
from .problem_gen import GEN_KINDS, GenSpec, gen_problem, rsnr, support_size
from .quantizer import KIND_ONEBIT
from .solver import ConditioningError, run

SCHEMA_VERSION = 1

RECORD_FIELDS = (
    "schema",
    "mode",
    "bit_budget",
    "M",
    "B",
    "snr_db",
    "seed",
    "problem_hash",
    "rsnr_db",
    "support_size",
    "iterations",
    "converged",
    "wall_time_s",
)

SUMMARY_FIELDS = (
    "schema",
    "mode",
    "bit_budget",
    "M",
    "B",
    "snr_db",
    "n_trials",
    "n_exact",
    "rsnr_db_mean",
    "rsnr_db_stderr",
    "support_size_mean",
    "support_size_stderr",
    "iterations_mean",
    "wall_time_s_mean",
    "wall_time_s_stderr",
)

SWEEP_MODES = ("qvmp", "coupled-baseline", "oracle")


@dataclass(frozen=True)
class SweepConfig:
    """Grid definition: a generation template minus M, plus the budget axis."""

    N: int = 200
    K: int = 10
    snr_db: float = 30.0
    quantizer_kind: str = "uniform"
    bit_depth: int = 4
    bit_budgets: tuple[int, ...] = tuple(range(100, 1001, 100))
    modes: tuple[str, ...] = ("qvmp",)
    trials: int = 50
    base_seed: int = 20260801
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.bit_budgets:
            raise ValueError("no bit budgets given")
        if self.quantizer_kind not in GEN_KINDS:
            raise ValueError(f"quantizer_kind must be one of {GEN_KINDS}")
        for budget in self.bit_budgets:
            if budget % self.bit_depth != 0:
                raise ValueError(
                    f"bit budget {budget} not divisible by bit depth {self.bit_depth}"
                )
            if budget // self.bit_depth <= self.K:
                raise ValueError(f"budget {budget} leaves M <= K")
        bad = [m for m in self.modes if m not in SWEEP_MODES]
        if bad:
            raise ValueError(f"unknown modes {bad}; expected subset of {SWEEP_MODES}")
        if not self.modes:
            raise ValueError("no modes requested")
        if self.quantizer_kind == "one-bit" and "coupled-baseline" in self.modes:
            raise ValueError("coupled-baseline is undefined for one-bit sweeps")


def trial_seed(base_seed: int, bit_budget: int, trial: int) -> int:
    """Stable 64-bit per-trial seed; all modes of a trial share it."""
    ss = np.random.SeedSequence([int(base_seed), int(bit_budget), int(trial)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def solver_config_for(sweep_mode: str, problem: Problem, base: SolverConfig) -> SolverConfig:
    """Map a sweep mode onto the engine mode for this problem's quantizer."""
    if sweep_mode == "qvmp":
        engine_mode = (
            MODE_ONEBIT if problem.quantizer.kind == KIND_ONEBIT else MODE_MULTIBIT
        )
    elif sweep_mode == "coupled-baseline":
        engine_mode = MODE_COUPLED
    elif sweep_mode == "oracle":
        engine_mode = MODE_ORACLE
    else:
        raise ValueError(f"unknown sweep mode {sweep_mode!r}")
    return replace(base, mode=engine_mode)


def fmt_value(v) -> str:
    """CSV cell formatting: floats at 17 significant digits."""
    if isinstance(v, bool):
        return "True" if v else "False"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _run_trial(config: SweepConfig, budget: int, trial: int) -> list[dict]:
    seed = trial_seed(config.base_seed, budget, trial)
    spec = GenSpec(
        N=config.N,
        K=config.K,
        M=budget // config.bit_depth,
        snr_db=config.snr_db,
        quantizer_kind=config.quantizer_kind,
        bit_depth=config.bit_depth,
        rng_seed=seed,
    )
    problem = gen_problem(spec)
    phash = problem_hash(problem)
    records = []
    for sweep_mode in config.modes:
        solver_config = solver_config_for(sweep_mode, problem, config.solver)
        t0 = time.perf_counter()
        try:
            result = run(problem, solver_config)
            rec_rsnr = rsnr(problem.truth, result.x_hat)
            rec = {
                "rsnr_db": rec_rsnr,
                "support_size": support_size(result.x_hat),
                "iterations": result.iterations,
                "converged": result.converged,
                "wall_time_s": result.wall_time,
            }
        except ConditioningError as err:
            rec = {
                "rsnr_db": math.nan,
                "support_size": 0,
                "iterations": err.iteration,
                "converged": False,
                "wall_time_s": time.perf_counter() - t0,
            }
        rec.update(
            schema=SCHEMA_VERSION,
            mode=sweep_mode,
            bit_budget=budget,
            M=spec.M,
            B=config.bit_depth,
            snr_db=float(config.snr_db),
            seed=seed,
            problem_hash=phash,
        )
        records.append(rec)
    return records


def run_sweep(config: SweepConfig, out: io.TextIOBase, workers: int = 1) -> int:
    """Execute the grid, streaming CSV rows to ``out`` in deterministic
    (budget, trial, mode) order.  Returns the number of failed solves."""
    out.write(",".join(RECORD_FIELDS) + "\n")
    out.flush()
    failures = 0

    def emit(trial_records: list[dict]) -> None:
        nonlocal failures
        for rec in trial_records:
            if isinstance(rec["rsnr_db"], float) and math.isnan(rec["rsnr_db"]):
                failures += 1
            out.write(",".join(fmt_value(rec[k]) for k in RECORD_FIELDS) + "\n")
        out.flush()

    jobs = [
        (budget, trial)
        for budget in config.bit_budgets
        for trial in range(config.trials)
    ]
    if workers <= 1:
        for budget, trial in jobs:
            emit(_run_trial(config, budget, trial))
    else:
        # completed futures are consumed in submission order, so the output
        # stream is identical for any worker count
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_trial, config, b, t) for b, t in jobs]
            for future in futures:
                emit(future.result())
    return failures


def parse_records_csv(text: str) -> list[dict]:
    """Parse a sweep CSV back into typed record dicts, checking the schema."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty records file")
    header = lines[0].split(",")
    if tuple(header) != RECORD_FIELDS:
        raise ValueError(f"unexpected records header: {header}")
    records = []
    for ln in lines[1:]:
        cells = ln.split(",")
        rec = dict(zip(RECORD_FIELDS, cells))
        if int(rec["schema"]) != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {rec['schema']}")
        for key in ("bit_budget", "M", "B", "seed", "support_size", "iterations"):
            rec[key] = int(rec[key])
        for key in ("snr_db", "rsnr_db", "wall_time_s"):
            rec[key] = float(rec[key])
        rec["schema"] = int(rec["schema"])
        rec["converged"] = rec["converged"] == "True"
        records.append(rec)
    return records


def _mean_stderr(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    mean = float(np.mean(arr))
    if arr.size < 2:
        return mean, 0.0
    return mean, float(np.std(arr, ddof=1) / math.sqrt(arr.size))


def summarize(records: list[dict]) -> list[dict]:
    """Per-(mode, budget) means and standard errors.

    Infinite RSNR sentinels (exact recoveries) are excluded from the RSNR
    mean and counted in ``n_exact``; NaN rows (failed solves) are excluded
    from every average.
    """
    if not records:
        raise ValueError("no records to summarize")
    groups: dict[tuple[str, int], list[dict]] = {}
    for rec in records:
        groups.setdefault((rec["mode"], rec["bit_budget"]), []).append(rec)
    rows = []
    for (mode, budget), recs in sorted(groups.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        ok = [r for r in recs if not math.isnan(r["rsnr_db"])]
        if not ok:
            warnings.warn(f"group ({mode}, {budget}) has no successful records; omitted")
            continue
        finite = [r["rsnr_db"] for r in ok if not math.isinf(r["rsnr_db"])]
        n_exact = sum(1 for r in ok if math.isinf(r["rsnr_db"]))
        rsnr_mean, rsnr_se = _mean_stderr(finite) if finite else (math.nan, math.nan)
        supp_mean, supp_se = _mean_stderr([r["support_size"] for r in ok])
        iters_mean, _ = _mean_stderr([r["iterations"] for r in ok])
        time_mean, time_se = _mean_stderr([r["wall_time_s"] for r in ok])
        rows.append(
            {
                "schema": SCHEMA_VERSION,
                "mode": mode,
                "bit_budget": budget,
                "M": recs[0]["M"],
                "B": recs[0]["B"],
                "snr_db": recs[0]["snr_db"],
                "n_trials": len(ok),
                "n_exact": n_exact,
                "rsnr_db_mean": rsnr_mean,
                "rsnr_db_stderr": rsnr_se,
                "support_size_mean": supp_mean,
                "support_size_stderr": supp_se,
                "iterations_mean": iters_mean,
                "wall_time_s_mean": time_mean,
                "wall_time_s_stderr": time_se,
            }
        )
    return rows


def write_summary_csv(rows: list[dict], out: io.TextIOBase) -> None:
    out.write(",".join(SUMMARY_FIELDS) + "\n")
    for row in rows:
        out.write(",".join(fmt_value(row[k]) for k in SUMMARY_FIELDS) + "\n")
