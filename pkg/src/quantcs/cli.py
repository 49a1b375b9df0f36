"""Command-line entry points: generate problems, solve them, run budget
sweeps, and aggregate sweep records.

Precedence for sweep settings: built-in defaults, then the JSON config file
(``--config``), then explicit command-line flags.

Exit codes: 0 success, 1 configuration error, 2 sweep completed with
recorded solver failures.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

from .experiment import (
    SWEEP_MODES,
    SweepConfig,
    parse_records_csv,
    run_sweep,
    solver_config_for,
    summarize,
    write_summary_csv,
)
from .model import SolverConfig, load_problem, problem_hash, save_problem
from .problem_gen import GEN_KINDS, GenSpec, gen_problem, rsnr, support_size
from .solver import ConditioningError, run


def _add_gen_args(p: argparse.ArgumentParser, defaults: bool = True) -> None:
    # the sweep subcommand leaves these unset (None) so a config file can be
    # distinguished from explicitly passed flags
    p.add_argument("--N", type=int, default=200 if defaults else None, help="signal length")
    p.add_argument("--K", type=int, default=10 if defaults else None, help="sparsity")
    p.add_argument(
        "--snr-db", type=float, default=30.0 if defaults else None,
        help="measurement SNR (dB)",
    )
    p.add_argument(
        "--quantizer", choices=GEN_KINDS, default="uniform" if defaults else None,
        help="quantizer family",
    )
    p.add_argument(
        "--bit-depth", type=int, default=4 if defaults else None,
        help="bits per measurement",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantcs",
        description="Sparse recovery from quantized measurements: problem "
        "generation, solving, and benchmark sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="materialize one synthetic problem")
    _add_gen_args(p_gen)
    p_gen.add_argument("--M", type=int, required=True, help="measurement count")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, help="output problem container")

    p_solve = sub.add_parser("solve", help="solve one stored problem")
    p_solve.add_argument("--problem", required=True, help="problem container path")
    p_solve.add_argument("--mode", choices=SWEEP_MODES, default="qvmp")
    p_solve.add_argument("--tol", type=float, default=1e-5)
    p_solve.add_argument("--max-iters", type=int, default=2000)
    p_solve.add_argument("--pruning-threshold", type=float, default=1e4)
    p_solve.add_argument("--trace", help="write per-iteration JSONL trace here")
    p_solve.add_argument("--out", help="write result JSON here (default stdout)")

    p_sweep = sub.add_parser("sweep", help="run a bit-budget sweep grid")
    _add_gen_args(p_sweep, defaults=False)
    p_sweep.add_argument("--config", help="JSON config file (flags override it)")
    p_sweep.add_argument(
        "--budgets", type=int, nargs="+", help="total bit budgets (M*B)"
    )
    p_sweep.add_argument("--modes", nargs="+", choices=SWEEP_MODES)
    p_sweep.add_argument("--trials", type=int)
    p_sweep.add_argument("--base-seed", type=int)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument(
        "--full-scale",
        action="store_true",
        help="full-size grid (N=500, 200 trials); slow",
    )
    p_sweep.add_argument("--out", required=True, help="records CSV path")

    p_sum = sub.add_parser("summarize", help="aggregate a records CSV")
    p_sum.add_argument("--records", required=True)
    p_sum.add_argument("--out", required=True, help="summary CSV path")
    return parser


def _cmd_gen(args) -> int:
    spec = GenSpec(
        N=args.N,
        K=args.K,
        M=args.M,
        snr_db=args.snr_db,
        quantizer_kind=args.quantizer,
        bit_depth=args.bit_depth,
        rng_seed=args.seed,
    )
    problem = gen_problem(spec)
    save_problem(problem, args.out)
    print(f"wrote {args.out} (hash {problem_hash(problem)[:16]})")
    return 0


def _cmd_solve(args) -> int:
    problem = load_problem(args.problem)
    base = SolverConfig(
        tol=args.tol,
        max_iters=args.max_iters,
        pruning_threshold=args.pruning_threshold,
    )
    config = solver_config_for(args.mode, problem, base)
    sink = None
    trace_fh = None
    if args.trace:
        trace_fh = open(args.trace, "w")
        sink = lambda rec: print(json.dumps(rec), file=trace_fh)
    try:
        result = run(problem, config, trace_sink=sink)
    except ConditioningError as err:
        print(f"solver failed: {err}", file=sys.stderr)
        return 2
    finally:
        if trace_fh is not None:
            trace_fh.close()
    payload = {
        "mode": args.mode,
        "status": result.status,
        "iterations": result.iterations,
        "converged": result.converged,
        "final_alpha_change": result.final_alpha_change,
        "support_size": support_size(result.x_hat),
        "wall_time_s": result.wall_time,
        "x_hat": [float(v) for v in result.x_hat],
    }
    if problem.truth is not None:
        r = rsnr(problem.truth, result.x_hat)
        payload["rsnr_db"] = "inf" if math.isinf(r) else r
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


_SWEEP_KEYS = (
    "N", "K", "snr_db", "quantizer_kind", "bit_depth",
    "bit_budgets", "modes", "trials", "base_seed",
)


def _sweep_config(args) -> SweepConfig:
    """Built-in defaults, overridden by the config file, overridden by flags."""
    settings = {
        "N": 200, "K": 10, "snr_db": 30.0, "quantizer_kind": "uniform",
        "bit_depth": 4, "bit_budgets": tuple(range(100, 1001, 100)),
        "modes": ("qvmp",), "trials": 50, "base_seed": 20260801,
    }
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(_SWEEP_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        settings.update(loaded)
    flags = {
        "N": args.N, "K": args.K, "snr_db": args.snr_db,
        "quantizer_kind": args.quantizer, "bit_depth": args.bit_depth,
        "bit_budgets": args.budgets, "modes": args.modes,
        "trials": args.trials, "base_seed": args.base_seed,
    }
    settings.update({k: v for k, v in flags.items() if v is not None})
    for key in ("bit_budgets", "modes"):
        settings[key] = tuple(settings[key])
    config = SweepConfig(**settings)
    if args.full_scale:
        config = replace(config, N=500, trials=200)
    return config


def _cmd_sweep(args) -> int:
    config = _sweep_config(args)
    with open(args.out, "w", newline="") as fh:
        failures = run_sweep(config, fh, workers=args.workers)
    total = len(config.bit_budgets) * config.trials * len(config.modes)
    print(f"wrote {args.out}: {total} records, {failures} failures")
    return 2 if failures else 0


def _cmd_summarize(args) -> int:
    with open(args.records) as fh:
        records = parse_records_csv(fh.read())
    rows = summarize(records)
    with open(args.out, "w", newline="") as fh:
        write_summary_csv(rows, fh)
    print(f"wrote {args.out}: {len(rows)} groups")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen": _cmd_gen,
        "solve": _cmd_solve,
        "sweep": _cmd_sweep,
        "summarize": _cmd_summarize,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
