"""Domain types binding the quantized observation model, the hierarchical
sparsity prior, and the variational posterior state.  No algorithms live
here; construction, validation, and serialization only."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .quantizer import KIND_ONEBIT, ErrorDomain, QuantizerSpec, error_domain

MODE_MULTIBIT = "multi-bit"
MODE_ONEBIT = "one-bit"
MODE_COUPLED = "coupled-baseline"
MODE_ORACLE = "oracle"
MODES = (MODE_MULTIBIT, MODE_ONEBIT, MODE_COUPLED, MODE_ORACLE)

_MAGIC = b"QCSP1\n"


@dataclass(frozen=True)
class PriorConfig:
    """Hyperparameters of the Gaussian-Gamma-Gamma sparsity prior.

    Defaults (eps=0, c=1, d=0) give a flat hyperprior on the shared rate and
    the sparsest per-coefficient behavior, approximating hard thresholding.
    """

    eps: float = 0.0
    c: float = 1.0
    d: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError(f"eps must be in [0, 1], got {self.eps}")
        if self.c < 0.0 or self.d < 0.0:
            raise ValueError("c and d must be nonnegative")
        if self.c == 0.0 and self.eps == 0.0:
            raise ValueError("need c > 0 when eps = 0 (rate moment undefined)")


@dataclass(frozen=True)
class SolverConfig:
    mode: str = MODE_MULTIBIT
    prior: PriorConfig = field(default_factory=PriorConfig)
    pruning_threshold: float = 1e4
    tol: float = 1e-5
    max_iters: int = 2000
    onebit_variance_scale: float = 1e-3
    rng_seed: int = 0  # provenance only; the iteration itself draws nothing

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.pruning_threshold > 1.0:
            raise ValueError("pruning_threshold must exceed 1")
        if not self.onebit_variance_scale > 0.0:
            raise ValueError("onebit_variance_scale must be positive")


@dataclass(frozen=True)
class Problem:
    """One quantized-sensing instance.

    ``z`` holds the observed codes (all zeros in one-bit mode, where the
    sign information lives in ``error_domain``).  ``y`` optionally keeps the
    pre-quantization noisy measurements: the oracle solver mode consumes
    them, and they are never visible to the quantized modes.  ``truth`` is
    carried for metrics only.
    """

    A: np.ndarray
    z: np.ndarray
    sigma2: float
    quantizer: QuantizerSpec
    error_domain: ErrorDomain
    truth: np.ndarray | None = None
    y: np.ndarray | None = None

    def __post_init__(self) -> None:
        A = np.ascontiguousarray(np.asarray(self.A, dtype=float))
        z = np.ascontiguousarray(np.asarray(self.z, dtype=float))
        if A.ndim != 2:
            raise ValueError(f"A must be 2-D, got shape {A.shape}")
        m, n = A.shape
        if z.shape != (m,):
            raise ValueError(f"z has shape {z.shape}, expected ({m},)")
        if len(self.error_domain) != m:
            raise ValueError(
                f"error domain covers {len(self.error_domain)} measurements, expected {m}"
            )
        if not self.sigma2 >= 0.0:
            raise ValueError(f"sigma2 must be nonnegative, got {self.sigma2}")
        if self.quantizer.kind == KIND_ONEBIT:
            if np.any(z != 0.0):
                idx = int(np.argmax(z != 0.0))
                raise ValueError(f"one-bit observation must be zero; z[{idx}]={z[idx]}")
        else:
            valid = np.isin(z, np.asarray(self.quantizer.codes))
            if not np.all(valid):
                idx = int(np.argmax(~valid))
                raise ValueError(f"z[{idx}]={z[idx]} is not a code of the quantizer")
        objs = {"A": A, "z": z}
        for name in ("truth", "y"):
            v = getattr(self, name)
            if v is not None:
                v = np.ascontiguousarray(np.asarray(v, dtype=float))
                want = (n,) if name == "truth" else (m,)
                if v.shape != want:
                    raise ValueError(f"{name} has shape {v.shape}, expected {want}")
                objs[name] = v
        for name, v in objs.items():
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape


@dataclass
class PosteriorState:
    """Variational moments over the surviving (active) columns.

    ``active`` indexes into the original column order; pruned coefficients
    are reported as exact zeros when the estimate is scattered back out.
    A state is owned by exactly one solver run.
    """

    mu: np.ndarray
    Sigma: np.ndarray
    inv_alpha: np.ndarray
    alpha: np.ndarray
    eta: float
    e_mean: np.ndarray
    active: np.ndarray


def _bins_from_problem(problem: Problem) -> np.ndarray:
    """Recover per-measurement bin indices from the stored observation."""
    q = problem.quantizer
    if q.kind == KIND_ONEBIT:
        signs = problem.error_domain.signs_array()  # -observed signs
        return (signs < 0).astype(np.int32)
    codes = np.asarray(q.codes)
    bins = np.searchsorted(codes, problem.z)
    bins = np.clip(bins, 0, q.levels - 1)
    return bins.astype(np.int32)


def problem_to_bytes(problem: Problem) -> bytes:
    """Self-describing binary container: JSON header line, then raw row-major
    float64 arrays (A, z, bins as int32, then y and truth when present)."""
    m, n = problem.shape
    header = {
        "M": m,
        "N": n,
        "sigma2": f"{problem.sigma2:.17g}",
        "quantizer": problem.quantizer.to_dict(),
        "has_y": problem.y is not None,
        "has_truth": problem.truth is not None,
    }
    parts = [
        _MAGIC,
        json.dumps(header, sort_keys=True, separators=(",", ":")).encode() + b"\n",
        np.ascontiguousarray(problem.A, dtype="<f8").tobytes(),
        np.ascontiguousarray(problem.z, dtype="<f8").tobytes(),
        np.ascontiguousarray(_bins_from_problem(problem), dtype="<i4").tobytes(),
    ]
    if problem.y is not None:
        parts.append(np.ascontiguousarray(problem.y, dtype="<f8").tobytes())
    if problem.truth is not None:
        parts.append(np.ascontiguousarray(problem.truth, dtype="<f8").tobytes())
    return b"".join(parts)


def problem_from_bytes(data: bytes) -> Problem:
    if not data.startswith(_MAGIC):
        raise ValueError("not a problem container (bad magic)")
    body = data[len(_MAGIC):]
    nl = body.index(b"\n")
    header = json.loads(body[:nl].decode())
    m, n = int(header["M"]), int(header["N"])
    q = QuantizerSpec.from_dict(header["quantizer"])
    off = nl + 1

    def take(count: int, dtype: str) -> np.ndarray:
        nonlocal off
        nbytes = count * np.dtype(dtype).itemsize
        arr = np.frombuffer(body, dtype=dtype, count=count, offset=off)
        off += nbytes
        return arr

    A = take(m * n, "<f8").reshape(m, n)
    z = take(m, "<f8")
    bins = take(m, "<i4").astype(int)
    y = take(m, "<f8") if header["has_y"] else None
    truth = take(n, "<f8") if header["has_truth"] else None
    return Problem(
        A=A,
        z=z,
        sigma2=float(header["sigma2"]),
        quantizer=q,
        error_domain=error_domain(q, bins),
        truth=truth,
        y=y,
    )


def problem_hash(problem: Problem) -> str:
    return hashlib.sha256(problem_to_bytes(problem)).hexdigest()


def save_problem(problem: Problem, path) -> None:
    with open(path, "wb") as fh:
        fh.write(problem_to_bytes(problem))


def load_problem(path) -> Problem:
    with open(path, "rb") as fh:
        return problem_from_bytes(fh.read())
