"""Seeded synthetic problem generation and evaluation metrics.

Instances follow the standard compressed-sensing benchmark recipe: a
K-sparse unit-norm signal with Gaussian nonzeros, a Gaussian sensing matrix
with variance 1/M (so the clean measurement vector has unit norm in
expectation), white measurement noise at a target SNR, and one of three
quantizer families applied to the noisy measurements.

Generation uses numpy's PCG64 via ``default_rng``; one 64-bit seed fully
determines an instance, and the draw order (support, coefficients, matrix,
noise) is part of the reproducibility contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Problem
from .quantizer import (
    KIND_ONEBIT,
    KIND_SATURATED,
    KIND_UNIFORM,
    error_domain,
    make_onebit,
    make_saturated_equiprobable,
    make_uniform,
    quantize,
)

GEN_KINDS = ("uniform", "saturated", "one-bit")

_KIND_ALIASES = {
    "uniform": KIND_UNIFORM,
    "saturated": KIND_SATURATED,
    "one-bit": KIND_ONEBIT,
}


@dataclass(frozen=True)
class GenSpec:
    """Recipe for one synthetic instance.

    ``M`` may exceed ``N``: sign-only acquisition regularly uses more
    measurements than unknowns.
    """

    N: int
    K: int
    M: int
    snr_db: float
    quantizer_kind: str = "uniform"
    bit_depth: int = 4
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.N < 1 or self.M < 1:
            raise ValueError("N and M must be positive")
        if not 0 <= self.K < self.M:
            raise ValueError(f"need 0 <= K < M, got K={self.K}, M={self.M}")
        if self.K > self.N:
            raise ValueError(f"sparsity {self.K} exceeds signal length {self.N}")
        if self.quantizer_kind not in GEN_KINDS:
            raise ValueError(f"quantizer_kind must be one of {GEN_KINDS}")
        if self.quantizer_kind == "one-bit":
            if self.bit_depth != 1:
                raise ValueError("one-bit quantizer implies bit_depth = 1")
        elif self.bit_depth < 2:
            raise ValueError("multi-bit quantizers need bit_depth >= 2")

    def noise_variance(self) -> float:
        """sigma^2 = 10^(-SNR/10) / M; an infinite SNR gives exactly 0."""
        if math.isinf(self.snr_db):
            return 0.0
        return 10.0 ** (-self.snr_db / 10.0) / self.M


def gen_problem(spec: GenSpec) -> Problem:
    rng = np.random.default_rng(np.random.SeedSequence(spec.rng_seed))
    x = np.zeros(spec.N)
    if spec.K > 0:
        support = rng.choice(spec.N, size=spec.K, replace=False)
        coeffs = rng.standard_normal(spec.K)
        x[support] = coeffs / np.linalg.norm(coeffs)
    A = rng.standard_normal((spec.M, spec.N)) / math.sqrt(spec.M)
    sigma2 = spec.noise_variance()
    noise = rng.standard_normal(spec.M) * math.sqrt(sigma2)
    y = A @ x + noise

    if spec.quantizer_kind == "uniform":
        q = make_uniform(spec.bit_depth, float(np.max(np.abs(y))))
    elif spec.quantizer_kind == "saturated":
        q = make_saturated_equiprobable(spec.bit_depth, 1.0 / spec.M + sigma2)
    else:
        q = make_onebit()
    z, bins = quantize(q, y)
    return Problem(
        A=A,
        z=z,
        sigma2=sigma2,
        quantizer=q,
        error_domain=error_domain(q, bins),
        truth=x,
        y=y,
    )


def rsnr(x: np.ndarray, x_hat: np.ndarray) -> float:
    """Reconstruction SNR in dB: -20 log10 ||x - x_hat||.  Exact recovery
    returns the +inf sentinel."""
    x = np.asarray(x, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    if x.shape != x_hat.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {x_hat.shape}")
    err = float(np.linalg.norm(x - x_hat))
    if err == 0.0:
        return math.inf
    return -20.0 * math.log10(err)


def support_size(x_hat: np.ndarray, threshold: float = 0.0) -> int:
    """Entries with magnitude strictly above ``threshold``.

    The solver reports pruned coefficients as exact zeros, so the default
    threshold 0 counts its support faithfully; dense baselines should pass a
    relative threshold instead.
    """
    if threshold < 0.0:
        raise ValueError("threshold must be nonnegative")
    return int(np.count_nonzero(np.abs(np.asarray(x_hat)) > threshold))


def sign_flip_rate(y0: np.ndarray, y: np.ndarray) -> float:
    """Fraction of entries whose sign differs (sign(0) = +1 convention)."""
    y0 = np.asarray(y0, dtype=float)
    y = np.asarray(y, dtype=float)
    if y0.shape != y.shape:
        raise ValueError(f"length mismatch: {y0.shape} vs {y.shape}")
    s0 = np.where(y0 >= 0.0, 1.0, -1.0)
    s1 = np.where(y >= 0.0, 1.0, -1.0)
    return float(np.mean(s0 != s1))
