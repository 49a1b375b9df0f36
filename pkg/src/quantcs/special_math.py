"""Numerically stable scalar special functions for truncated-Gaussian and
generalized-inverse-Gaussian (GIG) moment updates.

Two families of quantities are provided:

1) First moments of truncated Gaussian distributions.  The textbook ratio
       (phi(l) - phi(u)) / (Phi(u) - Phi(l))
   cancels catastrophically when both standardized bounds sit in the same
   far tail (a saturated quantizer routinely produces one-sided intervals
   with huge standardized bounds).  Whenever both bounds lie on the same
   side of zero the ratio is evaluated through the scaled complementary
   error function erfcx, which stays O(1) arbitrarily deep into the tail.

2) Moments E[a^i] of a GIG-distributed precision variable with density
       p(a) proportional to a^(eps - 3/2) * exp(-x2 / (2 a) - eta * a).
   These are ratios of modified Bessel functions K_nu.  For eps = 0 (the
   default configuration) only half-integer orders arise and the ratio has
   an elementary closed form, which is used directly; other eps values fall
   back to exponentially scaled Bessel evaluations so the ratio never
   under- or overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfcx, kve, ndtr

SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_SQRT2 = math.sqrt(2.0)

# Floor on the Bessel argument s = sqrt(2 * eta * x2).  The i = -1 moment
# grows like 1/s as x2 -> 0 (that divergence is what drives pruning) but must
# stay finite so the pruning threshold test fires cleanly.
S_FLOOR = 1e-12


@dataclass(frozen=True)
class Interval:
    """Real interval; either endpoint may be infinite.

    Degenerate intervals (lower == upper, finite) are tolerated so callers
    can funnel point limits through the same code path.
    """

    lower: float
    upper: float

    def __post_init__(self) -> None:
        lo, up = float(self.lower), float(self.upper)
        if math.isnan(lo) or math.isnan(up):
            raise ValueError("interval endpoints must not be NaN")
        if lo > up:
            raise ValueError(f"empty interval: ({lo}, {up})")
        if lo == up and math.isinf(lo):
            raise ValueError("degenerate interval at infinity")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float, tol: float = 0.0) -> bool:
        """Membership in the closure, padded by ``tol`` on finite ends."""
        return (self.lower - tol) <= x <= (self.upper + tol)


def std_normal_pdf(u: float) -> float:
    """Standard normal density. Underflows smoothly to 0 for |u| >~ 39."""
    return math.exp(-0.5 * u * u) / SQRT_2PI


def std_normal_cdf(u: float) -> float:
    """Standard normal CDF; accepts +-inf and returns exact 0/1 there."""
    return float(ndtr(u))


def _same_side_ratio(l: np.ndarray, u: np.ndarray) -> np.ndarray:
    """(phi(l)-phi(u)) / (Phi(u)-Phi(l)) for 0 <= l < u, u possibly +inf.

    Scaling numerator and denominator by exp(l^2 / 2) gives

        sqrt(2/pi) * (1 - d) / (erfcx(l/sqrt2) - d * erfcx(u/sqrt2)),

    with d = exp((l^2 - u^2)/2) in [0, 1); every factor stays in normal
    float range for arbitrarily large l.
    """
    a = erfcx(l / _SQRT2)
    delta = np.zeros_like(l)
    b_term = np.zeros_like(l)
    finite = np.isfinite(u)
    if np.any(finite):
        lf, uf = l[finite], u[finite]
        # (l-u)(l+u) avoids forming l^2 - u^2 from two nearly equal squares
        d = np.exp(0.5 * (lf - uf) * (lf + uf))
        delta[finite] = d
        b_term[finite] = d * erfcx(uf / _SQRT2)
    return SQRT_2_OVER_PI * (1.0 - delta) / (a - b_term)


def _std_trunc_ratio(l: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Mean of a standard normal truncated to [l, u], elementwise.

    Bounds may be infinite; requires l < u elementwise.
    """
    l = np.asarray(l, dtype=float)
    u = np.asarray(u, dtype=float)
    out = np.zeros(np.broadcast(l, u).shape)
    l, u = np.broadcast_arrays(l, u)

    unbounded = np.isneginf(l) & np.isposinf(u)
    nonneg = (l >= 0.0) & ~unbounded
    nonpos = (u <= 0.0) & ~unbounded
    straddle = ~(nonneg | nonpos | unbounded)

    if np.any(nonneg):
        out[nonneg] = _same_side_ratio(l[nonneg], u[nonneg])
    if np.any(nonpos):
        # reflect: mean on [l, u] = -mean on [-u, -l]
        out[nonpos] = -_same_side_ratio(-u[nonpos], -l[nonpos])
    if np.any(straddle):
        # interval brackets 0: Phi difference is >= Phi(min(|l|,|u|)) - 1/2,
        # no cancellation, so the direct formula is accurate
        ls, us = l[straddle], u[straddle]
        num = np.exp(-0.5 * ls * ls) - np.exp(-0.5 * us * us)
        den = ndtr(us) - ndtr(ls)
        out[straddle] = num / (SQRT_2PI * den)
    return out


def trunc_gauss_mean_many(
    mu: np.ndarray,
    sigma: float,
    lower: np.ndarray,
    upper: np.ndarray,
) -> np.ndarray:
    """First moments of N(mu_m, sigma^2) truncated to [lower_m, upper_m].

    Degenerate entries (lower == upper) return that point.  Results are
    clipped into the closed interval as a guard against the last-ulp
    rounding that can occur with extreme standardized bounds.
    """
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    mu = np.asarray(mu, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(lower > upper):
        bad = int(np.argmax(lower > upper))
        raise ValueError(f"empty interval at index {bad}")

    l = (lower - mu) / sigma
    u = (upper - mu) / sigma
    degenerate = l >= u  # equal bounds, or width below float resolution
    l_safe = np.where(degenerate, 0.0, l)
    u_safe = np.where(degenerate, 1.0, u)
    mean = mu + sigma * _std_trunc_ratio(l_safe, u_safe)
    if np.any(degenerate):
        midpoint = np.clip(mu, lower, upper)
        mean = np.where(degenerate, midpoint, mean)
    # clip into the closure; never lets a tail evaluation escape the domain
    return np.clip(mean, lower, upper)


def trunc_gauss_mean(mu: float, sigma: float, bounds: Interval) -> float:
    """First moment of N(mu, sigma^2) truncated to ``bounds``."""
    out = trunc_gauss_mean_many(
        np.array([mu]), sigma, np.array([bounds.lower]), np.array([bounds.upper])
    )
    return float(out[0])


def _bessel_k_ratio(order_num: float, order_den: float, s: np.ndarray) -> np.ndarray:
    """K_{order_num}(s) / K_{order_den}(s) via exponentially scaled kve.

    The exp(s) scalings cancel in the ratio, so the result is finite for s
    spanning [1e-12, 1e300].  K_{-nu} = K_{nu} is applied implicitly by kve.
    """
    return kve(order_num, s) / kve(order_den, s)


def gig_moment(i: float, x2: float, eta: float, eps: float = 0.0) -> float:
    """Moment E[a^i] of the GIG posterior of a precision variable.

    Density: p(a) proportional to a^(eps - 3/2) exp(-x2/(2a) - eta*a).
    Only i in {-1, +1} is exercised by the solver; other real i go through
    the general Bessel path untested.

    For eps = 0 the ratio involves only half-integer orders and

        E[a]    = sqrt(x2 / (2 eta))                    (ratio = 1),
        E[a^-1] = sqrt(2 eta / x2) * (1 + 1/s),         s = sqrt(2 eta x2),

    using K_{1/2}(s) = sqrt(pi/(2s)) e^-s and K_{3/2} = K_{1/2} (1 + 1/s).
    """
    if x2 <= 0.0:
        raise ValueError(f"x2 must be positive, got {x2}")
    if eta <= 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    if eps < 0.0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    s = max(math.sqrt(2.0 * eta * x2), S_FLOOR)
    if eps == 0.0 and i == 1:
        return math.sqrt(x2 / (2.0 * eta))
    if eps == 0.0 and i == -1:
        return math.sqrt(2.0 * eta / x2) * (1.0 + 1.0 / s)
    ratio = float(_bessel_k_ratio(eps + i - 0.5, eps - 0.5, np.asarray(s)))
    return (x2 / (2.0 * eta)) ** (0.5 * i) * ratio


def gig_moments_pm1(
    x2: np.ndarray, eta: float, eps: float = 0.0
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (E[a^-1], E[a]) across coordinates for shared eta."""
    x2 = np.asarray(x2, dtype=float)
    if np.any(x2 <= 0.0):
        bad = int(np.argmax(x2 <= 0.0))
        raise ValueError(f"x2 must be positive; index {bad} is {x2[bad]}")
    if eta <= 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    s = np.maximum(np.sqrt(2.0 * eta * x2), S_FLOOR)
    if eps == 0.0:
        alpha = np.sqrt(x2 / (2.0 * eta))
        inv_alpha = np.sqrt(2.0 * eta / x2) * (1.0 + 1.0 / s)
        return inv_alpha, alpha
    half_x2_eta = np.sqrt(x2 / (2.0 * eta))
    inv_alpha = _bessel_k_ratio(eps - 1.5, eps - 0.5, s) / half_x2_eta
    alpha = _bessel_k_ratio(eps + 0.5, eps - 0.5, s) * half_x2_eta
    return inv_alpha, alpha
