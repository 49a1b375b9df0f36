"""Euclidean projection onto the 1-bit quantization-error set.

With sign measurements, the feasible error set is the nonconvex

    D_e = { e : e_m * sign_m <= 0 for all m, ||e||_2 = 1 },

the unit sphere intersected with the orthant opposing the observed signs.
The projection has a closed form: keep the coordinates of v that already
point into the feasible orthant and renormalize; if none do, spend the whole
unit of norm on the single least-infeasible coordinate.

``brute_force_project`` is a grid-search oracle (M = 1..3 only) used to
verify the closed form.
"""

from __future__ import annotations

import math

import numpy as np


def sign_pm1(v: np.ndarray) -> np.ndarray:
    """Elementwise sign with sign(0) = +1 (so outputs are exactly +-1)."""
    return np.where(np.asarray(v, dtype=float) >= 0.0, 1.0, -1.0)


def _check_signs(signs: np.ndarray) -> np.ndarray:
    signs = np.asarray(signs, dtype=float)
    if signs.ndim != 1 or signs.size == 0:
        raise ValueError("signs must be a nonempty 1-D vector")
    if not np.all(np.abs(signs) == 1.0):
        raise ValueError("signs entries must be +-1")
    return signs


def project_onto_De(v: np.ndarray, signs: np.ndarray) -> np.ndarray:
    """Nearest point to ``v`` on the unit sphere opposing ``signs``.

    ``signs`` is the observed measurement sign vector; feasible points e
    satisfy e_m * signs_m <= 0 with unit l2 norm.  vbar = -signs * v flips v
    into the feasibility frame; coordinates with vbar > 0 (strictly) are kept
    and renormalized.  When no coordinate qualifies, the output is a one-hot
    vector at the first index maximizing vbar.
    """
    signs = _check_signs(signs)
    v = np.asarray(v, dtype=float)
    if v.shape != signs.shape:
        raise ValueError(f"shape mismatch: v {v.shape} vs signs {signs.shape}")
    vbar = -signs * v
    keep = vbar > 0.0
    e = np.zeros_like(v)
    if np.any(keep):
        kept = v[keep]
        e[keep] = kept / np.linalg.norm(kept)
    else:
        i0 = int(np.argmax(vbar))  # ties: lowest index
        e[i0] = -signs[i0]
    return e


def _sphere_grid(m: int, resolution: int) -> np.ndarray:
    """Uniform angular grid on the unit circle (m=2) or sphere (m=3)."""
    if m == 2:
        theta = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
        return np.column_stack([np.cos(theta), np.sin(theta)])
    theta = np.linspace(0.0, math.pi, resolution)  # polar
    phi = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    st = np.sin(tt)
    return np.column_stack(
        [(st * np.cos(pp)).ravel(), (st * np.sin(pp)).ravel(), np.cos(tt).ravel()]
    )


def discretization_bound(m: int, resolution: int) -> float:
    """Upper bound on the distance from any unit vector to the grid.

    Circle: half the angular spacing.  Sphere: nearest polar ring plus the
    worst azimuthal gap along that ring (chord <= angle).
    """
    if m == 1:
        return 0.0
    if m == 2:
        return 2.0 * math.sin(math.pi / (2.0 * resolution))
    if m == 3:
        return math.pi / (2.0 * (resolution - 1)) + math.pi / resolution
    raise ValueError(f"grid oracle supports m in 1..3, got {m}")


def brute_force_project(
    v: np.ndarray, signs: np.ndarray, grid_resolution: int = 4000
) -> np.ndarray:
    """Grid-search projection oracle for M in {1, 2, 3}.

    Grid points are reflected coordinatewise into the feasible orthant
    (e_m * signs_m <= 0); reflection never increases the distance to a
    feasible target, so the feasible set is covered at the grid's native
    resolution and the returned point is within ``discretization_bound`` of
    the true projection.
    """
    signs = _check_signs(signs)
    v = np.asarray(v, dtype=float)
    m = v.size
    if m == 1:
        return np.array([-signs[0]])
    if m not in (2, 3):
        raise ValueError(f"brute force oracle supports M in 1..3, got {m}")
    grid = _sphere_grid(m, grid_resolution)
    feasible = -np.abs(grid) * signs
    dist2 = np.sum((feasible - v) ** 2, axis=1)
    return feasible[int(np.argmin(dist2))]
