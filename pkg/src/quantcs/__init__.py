"""Sparse signal recovery from multi-bit and 1-bit quantized measurements.

The solver treats the quantization error as a latent variable with a known
feasible set and estimates it jointly with the signal under a hierarchical
sparsity prior, using coordinate-ascent variational updates.  A seeded
problem generator and a sweep harness reproduce the standard bit-budget
benchmarks.
"""

from .model import (
    MODE_COUPLED,
    MODE_MULTIBIT,
    MODE_ONEBIT,
    MODE_ORACLE,
    PosteriorState,
    PriorConfig,
    Problem,
    SolverConfig,
    load_problem,
    problem_from_bytes,
    problem_hash,
    problem_to_bytes,
    save_problem,
)
from .problem_gen import GenSpec, gen_problem, rsnr, sign_flip_rate, support_size
from .quantizer import (
    ErrorDomain,
    QuantizerSpec,
    error_domain,
    make_onebit,
    make_saturated_equiprobable,
    make_uniform,
    quantize,
)
from .solver import ConditioningError, RecoveryResult, run
from .special_math import Interval, gig_moment, std_normal_cdf, std_normal_pdf, trunc_gauss_mean

__all__ = [
    "ConditioningError",
    "ErrorDomain",
    "GenSpec",
    "Interval",
    "MODE_COUPLED",
    "MODE_MULTIBIT",
    "MODE_ONEBIT",
    "MODE_ORACLE",
    "PosteriorState",
    "PriorConfig",
    "Problem",
    "QuantizerSpec",
    "RecoveryResult",
    "SolverConfig",
    "error_domain",
    "gen_problem",
    "gig_moment",
    "load_problem",
    "make_onebit",
    "make_saturated_equiprobable",
    "make_uniform",
    "problem_from_bytes",
    "problem_hash",
    "problem_to_bytes",
    "quantize",
    "rsnr",
    "run",
    "save_problem",
    "sign_flip_rate",
    "std_normal_cdf",
    "std_normal_pdf",
    "support_size",
    "trunc_gauss_mean",
]

__version__ = "0.1.0"
