"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -s`` to see them
as they complete).

Criteria 8 and 9 compare against regression baselines pinned from the first
full run on the reference container; the +-0.5 dB guard band absorbs
BLAS-level reordering while still catching behavioral regressions.  The
figure-rendering criterion (11) needs the TypeScript package under
``frontend/`` to be built and is skipped when it is not.
"""

import io
import math
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from quantcs.experiment import (
    RECORD_FIELDS,
    SweepConfig,
    parse_records_csv,
    run_sweep,
    summarize,
    trial_seed,
    write_summary_csv,
)
from quantcs.model import SolverConfig
from quantcs.onebit import (
    brute_force_project,
    discretization_bound,
    project_onto_De,
    sign_pm1,
)
from quantcs.problem_gen import GenSpec, gen_problem, sign_flip_rate
from quantcs.quantizer import assign_bins, make_saturated_equiprobable, quantize
from quantcs.solver import posterior_cov_direct, posterior_cov_woodbury, run
from quantcs.special_math import Interval, gig_moments_pm1, trunc_gauss_mean

from oracles import trunc_mean_quad

SWEEP_WORKERS = 4
PIN_TOL_DB = 0.5

# pinned on first full run (base_seed 8801): mean RSNR in dB per (mode, budget)
CRIT8_PINS = {
    ("qvmp", 400): 27.072,
    ("qvmp", 700): 30.488,
    ("qvmp", 1000): 32.161,
    ("coupled-baseline", 400): 21.459,
    ("coupled-baseline", 700): 23.465,
    ("coupled-baseline", 1000): 24.920,
    ("oracle", 400): 39.066,
    ("oracle", 700): 41.427,
    ("oracle", 1000): 43.180,
}

# pinned on first full run (base_seed 9901): 1-bit mean RSNR in dB per budget
CRIT9_PINS = {200: -0.220, 600: 7.627, 1000: 8.718}


def _report(num: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"[criterion {num:2d}] {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    print("\n" + line)
    assert ok, line


def crit8_config() -> SweepConfig:
    return SweepConfig(
        N=200, K=10, snr_db=30.0, quantizer_kind="uniform", bit_depth=4,
        bit_budgets=(400, 700, 1000),
        modes=("qvmp", "coupled-baseline", "oracle"),
        trials=50, base_seed=8801,
    )


@pytest.fixture(scope="module")
def crit8_records():
    buf = io.StringIO()
    failures = run_sweep(crit8_config(), buf, workers=SWEEP_WORKERS)
    assert failures == 0
    return parse_records_csv(buf.getvalue())


def test_criterion_01_projection_matches_brute_force():
    rng = np.random.default_rng(101)
    res2, res3 = 20_000, 400
    bound2 = discretization_bound(2, res2)
    bound3 = discretization_bound(3, res3)
    worst = 0.0
    for m, n_pairs, res, bound in ((2, 1000, res2, bound2), (3, 200, res3, bound3)):
        for _ in range(n_pairs):
            v = rng.normal(size=m) * 10 ** rng.uniform(-2, 2)
            signs = sign_pm1(rng.normal(size=m))
            closed = project_onto_De(v, signs)
            brute = brute_force_project(v, signs, res)
            assert abs(np.linalg.norm(closed) - 1.0) <= 1e-12
            assert np.all(closed * signs <= 1e-12)
            d_closed = float(np.linalg.norm(closed - v))
            d_brute = float(np.linalg.norm(brute - v))
            assert d_closed <= d_brute + 1e-12, (m, v, signs)
            gap = d_brute - d_closed
            assert gap <= bound, (m, v, signs, gap, bound)
            worst = max(worst, gap)
    _report(1, "projection vs grid oracle", True, f"worst gap {worst:.2e}")


def test_criterion_02_truncated_mean_vs_quadrature():
    rng = np.random.default_rng(202)
    worst = 0.0
    for k in range(1000):
        mu = rng.uniform(-5, 5)
        sigma = 10 ** rng.uniform(-1, 1)
        style = k % 5
        if style == 0:  # narrow same-side interval anywhere up to |60|
            l = rng.uniform(-60, 59.9)
            u = l + 10 ** rng.uniform(-3, 1.5)
            lo, up = mu + sigma * l, mu + sigma * u
        elif style == 1:  # one-sided upper-infinite, far tails included
            lo, up = mu + sigma * rng.uniform(-60, 60), math.inf
        elif style == 2:  # one-sided lower-infinite
            lo, up = -math.inf, mu + sigma * rng.uniform(-60, 60)
        elif style == 3:  # deep same-side tail pairs
            l = rng.uniform(30, 59)
            u = l + rng.uniform(0.01, 1.0)
            side = 1.0 if rng.uniform() < 0.5 else -1.0
            lo, up = sorted((mu + sigma * side * l, mu + sigma * side * u))
        else:  # generic wide interval
            a, b = sorted(rng.uniform(-60, 60, 2))
            lo, up = mu + sigma * a, mu + sigma * b
        want = trunc_mean_quad(mu, sigma, lo, up)
        got = trunc_gauss_mean(mu, sigma, Interval(lo, up))
        err = abs(got - want)
        assert err <= 1e-8, (mu, sigma, lo, up, err)
        worst = max(worst, err)
    _report(2, "truncated-Gaussian mean vs quadrature", True, f"worst abs err {worst:.2e}")


def test_criterion_03_gig_half_integer_closed_forms():
    s_grid = np.logspace(-6, 6, 1000)
    eta = 0.5
    x2 = s_grid**2  # s = sqrt(2 * eta * x2) = s_grid
    inv_alpha, alpha = gig_moments_pm1(x2, eta)
    want_alpha = np.sqrt(x2 / (2 * eta))
    want_inv = np.sqrt(2 * eta / x2) * (1.0 + 1.0 / s_grid)
    rel_a = np.max(np.abs(alpha - want_alpha) / want_alpha)
    rel_i = np.max(np.abs(inv_alpha - want_inv) / want_inv)
    assert rel_a <= 1e-10 and rel_i <= 1e-10
    _report(3, "GIG moments at eps=0", True, f"worst rel err {max(rel_a, rel_i):.2e}")


def test_criterion_04_woodbury_equivalence():
    rng = np.random.default_rng(404)
    worst = 0.0
    for trial in range(100):
        if trial % 2 == 0:
            m, n = int(rng.integers(4, 12)), int(rng.integers(12, 30))  # M < N
        else:
            m, n = int(rng.integers(12, 30)), int(rng.integers(4, 12))  # M > N
        A = rng.normal(size=(m, n)) / math.sqrt(m)
        # keep instances moderately conditioned: 1e-10 agreement between two
        # factorization routes needs kappa well below 1e6 in double precision
        inv_alpha = 10 ** rng.uniform(-1, 1, n)
        sigma2 = 10 ** rng.uniform(-3, 0)
        direct = posterior_cov_direct(A, inv_alpha, sigma2)
        wood = posterior_cov_woodbury(A, inv_alpha, sigma2)
        rel = np.linalg.norm(direct - wood) / np.linalg.norm(direct)
        assert rel <= 1e-10, (m, n, sigma2, rel)
        worst = max(worst, rel)
    _report(4, "covariance route equivalence", True, f"worst rel Frobenius {worst:.2e}")


def test_criterion_05_sign_flip_rate():
    rng = np.random.default_rng(505)
    m_per, n, trials = 2000, 100, 500  # 10^6 measurements total
    flips = np.empty(trials)
    for t in range(trials):
        x = np.zeros(n)
        x[rng.choice(n, 10, replace=False)] = rng.standard_normal(10)
        x /= np.linalg.norm(x)
        A = rng.standard_normal((m_per, n)) / math.sqrt(m_per)
        y0 = A @ x
        sigma = math.sqrt(10.0 ** (-1.0) / m_per)
        flips[t] = sign_flip_rate(y0, y0 + rng.standard_normal(m_per) * sigma)
    rate = float(np.mean(flips))
    ok = abs(rate - 0.0975) <= 0.002
    _report(5, "sign-flip rate at 10 dB", ok, f"measured {rate:.4f}")


def test_criterion_06_saturation_rate():
    rng = np.random.default_rng(606)
    var = 1.0 / 128 + 4e-5
    q = make_saturated_equiprobable(4, var)
    y = rng.normal(scale=math.sqrt(var), size=1_000_000)
    _, bins = quantize(q, y)
    saturated = float(np.mean((bins == 0) | (bins == q.levels - 1)))
    ok = abs(saturated - 0.125) <= 0.005
    _report(6, "equiprobable saturation rate", ok, f"measured {saturated:.4f}")


@pytest.mark.slow
def test_criterion_07_noise_free_consistency():
    # consistency is a fixed-point property: run the same engine with a
    # tighter stop than the benchmark default so the iteration reaches it
    consistent = 0
    trials = 50
    for seed in range(trials):
        p = gen_problem(
            GenSpec(N=200, K=10, M=150, snr_db=math.inf, bit_depth=4, rng_seed=seed)
        )
        result = run(p, SolverConfig(mode="multi-bit", tol=1e-7))
        bins_hat = assign_bins(p.quantizer, p.A @ result.x_hat)
        _, bins = quantize(p.quantizer, p.y)
        consistent += bool(np.array_equal(bins_hat, bins))
    ok = consistent >= 0.95 * trials
    _report(7, "noise-free quantization consistency", ok, f"{consistent}/{trials} trials")


@pytest.mark.slow
def test_criterion_08_model_efficiency_gap(crit8_records):
    rows = summarize(crit8_records)
    means = {(r["mode"], r["bit_budget"]): r["rsnr_db_mean"] for r in rows}
    details = []
    ok = True
    for budget in (400, 700, 1000):
        q, c, o = (
            means[("qvmp", budget)],
            means[("coupled-baseline", budget)],
            means[("oracle", budget)],
        )
        details.append(f"b{budget}: {q:.2f}>{c:.2f}, oracle {o:.2f}")
        ok &= q > c and o >= q
    for key, pinned in CRIT8_PINS.items():
        ok &= abs(means[key] - pinned) <= PIN_TOL_DB
    _report(8, "decoupled error model beats coupled baseline", ok, "; ".join(details))


@pytest.mark.slow
def test_criterion_09_onebit_trend_and_feasibility():
    config = SweepConfig(
        N=200, K=10, snr_db=10.0, quantizer_kind="one-bit", bit_depth=1,
        bit_budgets=(200, 600, 1000), modes=("qvmp",), trials=50, base_seed=9901,
    )
    buf = io.StringIO()
    failures = run_sweep(config, buf, workers=SWEEP_WORKERS)
    assert failures == 0
    rows = summarize(parse_records_csv(buf.getvalue()))
    means = {r["bit_budget"]: r["rsnr_db_mean"] for r in rows}
    ok = means[200] < means[600] < means[1000]
    for budget, pinned in CRIT9_PINS.items():
        ok &= abs(means[budget] - pinned) <= PIN_TOL_DB

    # per-iteration feasibility of the error estimate, on swept instances
    for budget in (200, 600, 1000):
        for trial in (0, 1):
            seed = trial_seed(config.base_seed, budget, trial)
            p = gen_problem(
                GenSpec(N=200, K=10, M=budget, snr_db=10.0,
                        quantizer_kind="one-bit", bit_depth=1, rng_seed=seed)
            )
            traces = []
            result = run(p, SolverConfig(mode="one-bit"), trace_sink=traces.append)
            assert traces
            assert all(abs(t["e_norm"] - 1.0) <= 1e-12 for t in traces)
            assert all(t["e_max_sign_violation"] <= 0.0 for t in traces)
            assert abs(np.linalg.norm(result.x_hat) - 1.0) <= 1e-12
    _report(
        9, "one-bit budget trend and feasibility", ok,
        f"means {means[200]:.2f} < {means[600]:.2f} < {means[1000]:.2f}",
    )


@pytest.mark.slow
def test_criterion_10_sweep_determinism():
    config = SweepConfig(
        N=200, K=10, snr_db=30.0, quantizer_kind="uniform", bit_depth=4,
        bit_budgets=(400,), modes=("qvmp", "coupled-baseline", "oracle"),
        trials=50, base_seed=8801,
    )
    outputs = []
    for _ in range(2):
        buf = io.StringIO()
        run_sweep(config, buf, workers=SWEEP_WORKERS)
        col = RECORD_FIELDS.index("wall_time_s")
        stripped = "\n".join(
            ",".join(c for i, c in enumerate(ln.split(",")) if i != col)
            for ln in buf.getvalue().splitlines()
        )
        outputs.append(stripped)
    ok = outputs[0] == outputs[1]
    _report(10, "byte-identical sweep reruns", ok)


FRONTEND_CLI = Path(__file__).resolve().parent.parent / "frontend" / "dist" / "src" / "cli.js"


@pytest.mark.slow
@pytest.mark.skipif(
    shutil.which("node") is None or not FRONTEND_CLI.exists(),
    reason="figure renderer not built (secondary component)",
)
def test_criterion_11_figure_rendering(crit8_records, tmp_path):
    summary_csv = tmp_path / "summary.csv"
    with open(summary_csv, "w", newline="") as fh:
        write_summary_csv(summarize(crit8_records), fh)
    figures = []
    for name in ("fig_a.svg", "fig_b.svg"):
        out = tmp_path / name
        proc = subprocess.run(
            ["node", str(FRONTEND_CLI), "--input", str(summary_csv),
             "--metric", "rsnr_db", "--out", str(out)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        figures.append(out.read_bytes())
    svg = figures[0].decode()
    ok = svg.count('class="series-line"') == 3 and figures[0] == figures[1]
    _report(11, "three-curve figure renders deterministically", ok)
