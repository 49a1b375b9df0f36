"""Variational inference engine for quantized sensing problems.

Each iteration cycles the coordinate updates of the factorized posterior in
a fixed order: signal covariance, signal mean, per-coefficient precision
moments, shared rate moment, and finally the quantization-error mean (a
truncated-Gaussian moment per measurement in multi-bit mode, a projection
onto the sign-feasible unit sphere in one-bit mode).  Columns whose inferred
inverse variance exceeds the pruning threshold are removed permanently,
shrinking the model as the estimate sparsifies.

Two degenerate modes reuse the same engine: ``coupled-baseline`` freezes the
error estimate at zero and inflates the noise variance by the nominal
quantization-noise energy r^2/12, and ``oracle`` runs on the unquantized
measurements with the error frozen at zero.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .model import (
    MODE_COUPLED,
    MODE_MULTIBIT,
    MODE_ONEBIT,
    MODE_ORACLE,
    PosteriorState,
    Problem,
    SolverConfig,
)
from .onebit import project_onto_De
from .quantizer import KIND_ONEBIT, KIND_UNIFORM
from .special_math import gig_moments_pm1, trunc_gauss_mean_many

# Guards: inner products near zero at initialization, and second moments of
# effectively dead coefficients, are floored rather than allowed to divide out.
INIT_CORR_FLOOR = 1e-12
X2_FLOOR = 1e-30
SIGMA2_FLOOR_SCALE = 1e-12

TraceSink = Callable[[dict], None]


class ConditioningError(RuntimeError):
    """Posterior covariance factorization failed."""

    def __init__(self, iteration: int, detail: str = ""):
        self.iteration = iteration
        super().__init__(
            f"covariance factorization failed at iteration {iteration}"
            + (f": {detail}" if detail else "")
        )


@dataclass
class RecoveryResult:
    x_hat: np.ndarray
    iterations: int
    converged: bool
    final_alpha_change: float
    active_count_trace: list[int]
    wall_time: float
    status: str  # "converged" | "max-iters" | "all-pruned"


@dataclass(frozen=True)
class RunContext:
    """Per-run constants resolved from (problem, config)."""

    A: np.ndarray
    AtA: np.ndarray
    z_eff: np.ndarray
    sigma2: float  # effective likelihood variance (floored, mode-adjusted)
    sigma: float
    mode: str
    eps: float
    c: float
    d: float
    pruning_threshold: float
    estimate_error: bool  # False: e frozen at 0 (coupled-baseline / oracle)
    lowers: np.ndarray | None = None
    uppers: np.ndarray | None = None
    z_signs: np.ndarray | None = None


def _effective_sigma2(problem: Problem, config: SolverConfig) -> float:
    sigma2 = problem.sigma2
    if sigma2 == 0.0:
        # the mean update divides by sigma^2; operate at a relative floor
        sigma2 = SIGMA2_FLOOR_SCALE * float(np.mean(np.sum(problem.A**2, axis=0)))
    if config.mode == MODE_ONEBIT:
        return config.onebit_variance_scale * sigma2
    if config.mode == MODE_COUPLED:
        if problem.quantizer.kind != KIND_UNIFORM:
            raise ValueError("coupled-baseline mode needs a uniform quantizer bin width")
        r = problem.quantizer.thresholds[1] - problem.quantizer.thresholds[0]
        return r * r / 12.0 + problem.sigma2
    return sigma2


def build_context(problem: Problem, config: SolverConfig) -> RunContext:
    onebit_problem = problem.quantizer.kind == KIND_ONEBIT
    if config.mode == MODE_ONEBIT and not onebit_problem:
        raise ValueError("one-bit mode requires a one-bit quantized problem")
    if config.mode in (MODE_MULTIBIT, MODE_COUPLED) and onebit_problem:
        raise ValueError(f"{config.mode} mode cannot run on a one-bit problem")
    if config.mode == MODE_ORACLE and problem.y is None:
        raise ValueError("oracle mode needs the unquantized measurements")

    z_eff = problem.y if config.mode == MODE_ORACLE else problem.z
    sigma2 = _effective_sigma2(problem, config)
    kwargs: dict = {}
    if config.mode == MODE_MULTIBIT:
        lowers, uppers = problem.error_domain.bounds_arrays()
        kwargs.update(lowers=lowers, uppers=uppers)
    elif config.mode == MODE_ONEBIT:
        kwargs.update(z_signs=-problem.error_domain.signs_array())
    return RunContext(
        A=problem.A,
        AtA=problem.A.T @ problem.A,
        z_eff=np.asarray(z_eff, dtype=float),
        sigma2=sigma2,
        sigma=math.sqrt(sigma2),
        mode=config.mode,
        eps=config.prior.eps,
        c=config.prior.c,
        d=config.prior.d,
        pruning_threshold=config.pruning_threshold,
        estimate_error=config.mode in (MODE_MULTIBIT, MODE_ONEBIT),
        **kwargs,
    )


def initial_state(ctx: RunContext) -> PosteriorState:
    """Correlation-based precision seeds and the mode's error-mean seed."""
    m, n = ctx.A.shape
    if ctx.mode == MODE_ONEBIT:
        corr = np.abs(ctx.A.T @ ctx.z_signs)
        inv_alpha = math.sqrt(m) / np.maximum(corr, INIT_CORR_FLOOR)
        e_mean = -ctx.z_signs / math.sqrt(m)
    else:
        corr = np.abs(ctx.A.T @ ctx.z_eff)
        inv_alpha = 1.0 / np.maximum(corr, INIT_CORR_FLOOR)
        e_mean = np.zeros(m)
    return PosteriorState(
        mu=np.zeros(n),
        Sigma=np.zeros((n, n)),
        inv_alpha=inv_alpha,
        alpha=1.0 / inv_alpha,
        eta=1.0,
        e_mean=e_mean,
        active=np.arange(n),
    )


def posterior_cov_direct(
    A: np.ndarray, inv_alpha: np.ndarray, sigma2: float, AtA: np.ndarray | None = None
) -> np.ndarray:
    """Sigma = (A^T A / sigma^2 + diag(inv_alpha))^-1 via Cholesky."""
    if AtA is None:
        AtA = A.T @ A
    prec = AtA / sigma2
    prec[np.diag_indices_from(prec)] += inv_alpha
    n = prec.shape[0]
    factor = cho_factor(prec, lower=True, check_finite=False)
    cov = cho_solve(factor, np.eye(n), check_finite=False)
    return 0.5 * (cov + cov.T)


def posterior_cov_woodbury(
    A: np.ndarray, inv_alpha: np.ndarray, sigma2: float
) -> np.ndarray:
    """Same Sigma through the MxM capacitance C = sigma^2 I + A Lam A^T.

    Cheaper than the direct route when the active column count exceeds the
    measurement count.
    """
    m = A.shape[0]
    lam = 1.0 / inv_alpha
    H = A * np.sqrt(lam)  # C = sigma^2 I + H H^T
    C = H @ H.T
    C[np.diag_indices_from(C)] += sigma2
    factor = cho_factor(C, lower=True, check_finite=False)
    G = A * lam
    cov = -G.T @ cho_solve(factor, G, check_finite=False)
    cov[np.diag_indices_from(cov)] += lam
    return 0.5 * (cov + cov.T)


def update_sigma(state: PosteriorState, ctx: RunContext) -> None:
    """Signal covariance over active columns; route chosen by shape."""
    act = state.active
    A = ctx.A[:, act]
    m = A.shape[0]
    if len(act) > m:
        state.Sigma = posterior_cov_woodbury(A, state.inv_alpha, ctx.sigma2)
    else:
        AtA = ctx.AtA[np.ix_(act, act)]
        state.Sigma = posterior_cov_direct(A, state.inv_alpha, ctx.sigma2, AtA=AtA)


def update_mu(state: PosteriorState, ctx: RunContext) -> None:
    """mu = Sigma A^T (z - <e>) / sigma^2 over active columns."""
    A = ctx.A[:, state.active]
    state.mu = state.Sigma @ (A.T @ (ctx.z_eff - state.e_mean)) / ctx.sigma2


def update_alpha(state: PosteriorState, ctx: RunContext) -> None:
    """Precision moments from the per-coefficient second moments."""
    x2 = np.maximum(state.mu**2 + np.diag(state.Sigma), X2_FLOOR)
    state.inv_alpha, state.alpha = gig_moments_pm1(x2, state.eta, ctx.eps)


def update_eta(state: PosteriorState, ctx: RunContext) -> None:
    """Shared rate moment; the sum runs over surviving columns only."""
    n_active = len(state.active)
    state.eta = (n_active * ctx.eps + ctx.c) / (float(np.sum(state.alpha)) + ctx.d)


def update_e_multibit(state: PosteriorState, ctx: RunContext) -> None:
    """Per-measurement truncated-Gaussian means around z - A mu."""
    center = ctx.z_eff - ctx.A[:, state.active] @ state.mu
    state.e_mean = trunc_gauss_mean_many(center, ctx.sigma, ctx.lowers, ctx.uppers)


def update_e_onebit(state: PosteriorState, ctx: RunContext) -> None:
    """Projection of z - A mu (= -A mu) onto the sign-feasible unit sphere."""
    v = ctx.z_eff - ctx.A[:, state.active] @ state.mu
    state.e_mean = project_onto_De(v, ctx.z_signs)


def update_e(state: PosteriorState, ctx: RunContext) -> None:
    if not ctx.estimate_error:
        return  # frozen at zero for coupled-baseline / oracle
    if ctx.mode == MODE_ONEBIT:
        update_e_onebit(state, ctx)
    else:
        update_e_multibit(state, ctx)


def prune(state: PosteriorState, ctx: RunContext) -> int:
    """Permanently drop columns whose inverse variance crossed the threshold.

    Returns the number of columns removed; all per-column vectors and both
    covariance dimensions shrink consistently.
    """
    keep = state.inv_alpha <= ctx.pruning_threshold
    dropped = int(keep.size - np.count_nonzero(keep))
    if dropped == 0:
        return 0
    state.active = state.active[keep]
    state.mu = state.mu[keep]
    state.Sigma = state.Sigma[np.ix_(keep, keep)]
    state.inv_alpha = state.inv_alpha[keep]
    state.alpha = state.alpha[keep]
    return dropped


def alpha_tilde(state: PosteriorState, n_full: int) -> np.ndarray:
    """Convergence vector: per-column variances, exact zeros once pruned."""
    full = np.zeros(n_full)
    full[state.active] = 1.0 / state.inv_alpha
    return full


def _objective(state: PosteriorState, ctx: RunContext) -> float:
    """Joint penalized-residual surrogate recorded in iteration traces."""
    resid = ctx.z_eff - state.e_mean - ctx.A[:, state.active] @ state.mu
    prior_term = 0.5 * float(np.dot(state.inv_alpha, state.mu**2))
    return prior_term + float(resid @ resid) / (2.0 * ctx.sigma2)


def _trace_record(state, ctx, iteration: int, change: float) -> dict:
    rec = {
        "iteration": iteration,
        "active": len(state.active),
        "alpha_change": change,
        "objective": _objective(state, ctx),
    }
    if ctx.mode == MODE_ONEBIT:
        rec["e_norm"] = float(np.linalg.norm(state.e_mean))
        rec["e_max_sign_violation"] = float(np.max(state.e_mean * ctx.z_signs))
    elif ctx.mode == MODE_MULTIBIT:
        rec["e_in_domain"] = bool(
            np.all(state.e_mean >= ctx.lowers) and np.all(state.e_mean <= ctx.uppers)
        )
    return rec


def run(
    problem: Problem, config: SolverConfig, trace_sink: TraceSink | None = None
) -> RecoveryResult:
    """Iterate to convergence of the per-column variance vector.

    Stops when the relative change of that vector (zeros kept at pruned
    positions so pruning itself neither masks nor fakes convergence) falls
    below ``config.tol``, or at ``config.max_iters``.  In one-bit mode the
    returned estimate is scaled to unit norm, the only scale the sign
    measurements determine.
    """
    t_start = time.perf_counter()
    ctx = build_context(problem, config)
    n_full = problem.shape[1]
    state = initial_state(ctx)
    prev_tilde = alpha_tilde(state, n_full)
    active_counts = [len(state.active)]
    status = "max-iters"
    converged = False
    change = math.inf
    iteration = 0

    for iteration in range(1, config.max_iters + 1):
        try:
            update_sigma(state, ctx)
        except LinAlgError as err:
            raise ConditioningError(iteration, str(err)) from err
        update_mu(state, ctx)
        update_alpha(state, ctx)
        prune(state, ctx)
        if len(state.active) == 0:
            status = "all-pruned"
            active_counts.append(0)
            change = 1.0
            break
        update_eta(state, ctx)
        update_e(state, ctx)

        tilde = alpha_tilde(state, n_full)
        change = float(
            np.linalg.norm(tilde - prev_tilde) / np.linalg.norm(prev_tilde)
        )
        prev_tilde = tilde
        active_counts.append(len(state.active))
        if trace_sink is not None:
            trace_sink(_trace_record(state, ctx, iteration, change))
        if change < config.tol:
            status = "converged"
            converged = True
            break

    x_hat = np.zeros(n_full)
    if status != "all-pruned":
        x_hat[state.active] = state.mu
        if ctx.mode == MODE_ONEBIT:
            norm = np.linalg.norm(x_hat)
            if norm > 0.0:
                x_hat /= norm
    return RecoveryResult(
        x_hat=x_hat,
        iterations=iteration,
        converged=converged,
        final_alpha_change=change,
        active_count_trace=active_counts,
        wall_time=time.perf_counter() - t_start,
        status=status,
    )
