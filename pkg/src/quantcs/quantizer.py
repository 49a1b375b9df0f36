"""Scalar quantizer construction, elementwise application, and the
per-measurement quantization-error domains the solver consumes.

A quantizer is a strictly increasing threshold ladder u_0 < ... < u_L with a
code v_b for each bin [u_b, u_{b+1}); the outer thresholds may be infinite
(saturated kinds).  Observing code v_b pins the error e = z - y to the
interval (v_b - u_{b+1}, v_b - u_b].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .special_math import Interval

KIND_UNIFORM = "uniform-unsaturated"
KIND_SATURATED = "saturated"
KIND_ONEBIT = "one-bit"
KINDS = (KIND_UNIFORM, KIND_SATURATED, KIND_ONEBIT)


@dataclass(frozen=True)
class QuantizerSpec:
    """Threshold/code tables defining a scalar quantizer.

    The one-bit kind keeps exact-zero codes (the code magnitude is an
    arbitrarily small positive number in the limit); the information content
    of a one-bit observation is carried entirely by the bin index, i.e. the
    sign.
    """

    thresholds: tuple[float, ...]
    codes: tuple[float, ...]
    bit_depth: int
    kind: str

    def __post_init__(self) -> None:
        thr = tuple(float(t) for t in self.thresholds)
        codes = tuple(float(c) for c in self.codes)
        object.__setattr__(self, "thresholds", thr)
        object.__setattr__(self, "codes", codes)
        if self.kind not in KINDS:
            raise ValueError(f"unknown quantizer kind {self.kind!r}")
        levels = len(thr) - 1
        if levels < 2:
            raise ValueError("need at least two quantization levels")
        if len(codes) != levels:
            raise ValueError(f"{len(codes)} codes for {levels} bins")
        if levels != 2 ** self.bit_depth:
            raise ValueError(f"{levels} levels inconsistent with B={self.bit_depth}")
        for i in range(levels):
            if not thr[i] < thr[i + 1]:
                raise ValueError(f"thresholds not strictly increasing at {i}")
        if self.kind == KIND_ONEBIT:
            if levels != 2 or thr != (-math.inf, 0.0, math.inf):
                raise ValueError("one-bit quantizer must split at 0 with infinite ends")
        else:
            for i, c in enumerate(codes):
                if not (thr[i] <= c < thr[i + 1]):
                    raise ValueError(f"code {c} outside bin {i}")

    @property
    def levels(self) -> int:
        return len(self.codes)

    @property
    def saturated(self) -> bool:
        return math.isinf(self.thresholds[0]) or math.isinf(self.thresholds[-1])

    def to_dict(self) -> dict:
        """Serializable form; floats as 17-significant-digit decimal strings."""
        return {
            "kind": self.kind,
            "bit_depth": self.bit_depth,
            "thresholds": [f"{t:.17g}" for t in self.thresholds],
            "codes": [f"{c:.17g}" for c in self.codes],
        }

    @staticmethod
    def from_dict(d: dict) -> "QuantizerSpec":
        return QuantizerSpec(
            thresholds=tuple(float(t) for t in d["thresholds"]),
            codes=tuple(float(c) for c in d["codes"]),
            bit_depth=int(d["bit_depth"]),
            kind=str(d["kind"]),
        )


@dataclass(frozen=True)
class ErrorDomain:
    """Feasible set of the quantization error e = z - y, per measurement.

    Multi-bit: one interval per measurement (``intervals`` set).
    One-bit: e must oppose the observed signs and carry unit l2 norm
    (``e_signs`` = -observed signs, ``unit_norm`` = True).
    """

    intervals: tuple[Interval, ...] | None = None
    e_signs: tuple[float, ...] | None = None
    unit_norm: bool = False

    def __post_init__(self) -> None:
        if (self.intervals is None) == (self.e_signs is None):
            raise ValueError("exactly one of intervals / e_signs must be set")
        if self.e_signs is not None:
            signs = tuple(float(s) for s in self.e_signs)
            if any(abs(s) != 1.0 for s in signs):
                raise ValueError("e_signs entries must be +-1")
            object.__setattr__(self, "e_signs", signs)
            if not self.unit_norm:
                raise ValueError("one-bit error domain requires unit_norm")

    def __len__(self) -> int:
        return len(self.intervals if self.intervals is not None else self.e_signs)

    def bounds_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(lowers, uppers) arrays for the interval (multi-bit) variant."""
        if self.intervals is None:
            raise ValueError("interval bounds undefined for a one-bit domain")
        lowers = np.array([iv.lower for iv in self.intervals])
        uppers = np.array([iv.upper for iv in self.intervals])
        return lowers, uppers

    def signs_array(self) -> np.ndarray:
        if self.e_signs is None:
            raise ValueError("sign pattern undefined for a multi-bit domain")
        return np.array(self.e_signs)


def make_uniform(B: int, y_abs_max: float) -> QuantizerSpec:
    """Uniform unsaturated quantizer: 2^B equal bins on [-y_abs_max, y_abs_max],
    codes at bin midpoints."""
    if B < 2:
        raise ValueError(f"uniform quantizer needs B >= 2, got {B}")
    if not y_abs_max > 0.0:
        raise ValueError(f"y_abs_max must be positive, got {y_abs_max}")
    levels = 2**B
    thr = np.linspace(-y_abs_max, y_abs_max, levels + 1)
    codes = 0.5 * (thr[:-1] + thr[1:])
    return QuantizerSpec(tuple(thr), tuple(codes), B, KIND_UNIFORM)


def make_saturated_equiprobable(B: int, meas_variance: float) -> QuantizerSpec:
    """Saturated quantizer equiprobable under measurements ~ N(0, meas_variance).

    Interior thresholds are the k/2^B Gaussian quantiles; the outer bins are
    unbounded.  Codes sit at interior-bin midpoints; the unbounded bins mirror
    the adjacent interior half-width outward so every code stays finite.
    """
    if B < 2:
        raise ValueError(f"saturated quantizer needs B >= 2, got {B}")
    if not meas_variance > 0.0:
        raise ValueError(f"meas_variance must be positive, got {meas_variance}")
    levels = 2**B
    scale = math.sqrt(meas_variance)
    inner = scale * ndtri(np.arange(1, levels) / levels)
    thr = np.concatenate([[-math.inf], inner, [math.inf]])
    codes = np.empty(levels)
    codes[1:-1] = 0.5 * (inner[:-1] + inner[1:])
    codes[0] = inner[0] - 0.5 * (inner[1] - inner[0])
    codes[-1] = inner[-1] + 0.5 * (inner[-1] - inner[-2])
    return QuantizerSpec(tuple(thr), tuple(codes), B, KIND_SATURATED)


def make_onebit() -> QuantizerSpec:
    """Sign quantizer: two bins split at 0, zero-magnitude codes."""
    return QuantizerSpec((-math.inf, 0.0, math.inf), (0.0, 0.0), 1, KIND_ONEBIT)


def assign_bins(q: QuantizerSpec, y: np.ndarray) -> np.ndarray:
    """Bin index per entry; -1 marks out-of-range entries (unsaturated only).

    Bins are half-open [u_b, u_{b+1}); a value exactly at the top threshold
    is absorbed into the last bin.
    """
    y = np.asarray(y, dtype=float)
    thr = np.asarray(q.thresholds)
    bins = np.searchsorted(thr, y, side="right") - 1
    bins[y == thr[-1]] = q.levels - 1
    out = (bins < 0) | (bins > q.levels - 1)
    bins[out] = -1
    return bins


def quantize(q: QuantizerSpec, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise quantization: returns (codes, bin indices).

    Raises for out-of-range input to an unsaturated quantizer, identifying
    the first offending index.
    """
    y = np.asarray(y, dtype=float)
    bins = assign_bins(q, y)
    if np.any(bins < 0):
        idx = int(np.argmax(bins < 0))
        raise ValueError(
            f"input {y.flat[idx]} at index {idx} outside quantizer range "
            f"[{q.thresholds[0]}, {q.thresholds[-1]}]"
        )
    z = np.asarray(q.codes)[bins]
    return z, bins


def onebit_signs(bins: np.ndarray) -> np.ndarray:
    """Observed sign vector from one-bit bin indices (bin 1 = nonnegative)."""
    return 2.0 * np.asarray(bins, dtype=float) - 1.0


def error_domain(q: QuantizerSpec, bins: np.ndarray) -> ErrorDomain:
    """Feasible quantization-error set implied by observed bin indices.

    Multi-bit: bin b gives e in (v_b - u_{b+1}, v_b - u_b]; infinite
    thresholds propagate to unbounded intervals (saturation).
    One-bit: the error must oppose the observed signs, with unit norm.
    """
    bins = np.asarray(bins, dtype=int)
    if np.any((bins < 0) | (bins >= q.levels)):
        idx = int(np.argmax((bins < 0) | (bins >= q.levels)))
        raise ValueError(f"invalid bin index {bins[idx]} at {idx}")
    if q.kind == KIND_ONEBIT:
        return ErrorDomain(e_signs=tuple(-onebit_signs(bins)), unit_norm=True)
    thr = np.asarray(q.thresholds)
    codes = np.asarray(q.codes)
    lowers = codes[bins] - thr[bins + 1]
    uppers = codes[bins] - thr[bins]
    return ErrorDomain(
        intervals=tuple(Interval(lo, up) for lo, up in zip(lowers, uppers))
    )
