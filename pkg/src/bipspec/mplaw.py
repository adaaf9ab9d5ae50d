"""Marchenko-Pastur limit law for bipartite block matrices.

For aspect ratio ``alpha = m/n >= 1`` the squared singular values of a
standardized m x n matrix, divided by m, follow the Marchenko-Pastur
density

    p(x) = alpha / (2 pi x) * sqrt((b^2 - x)(x - a^2))   on [a^2, b^2],

with edges ``a = 1 - alpha**-0.5`` and ``b = 1 + alpha**-0.5``.  The
(m+n)-eigenvalue symmetric block spectrum then follows the symmetrized
law: continuous density

    q(x) = 2|x| / (1 + alpha) * p(x^2)                   on |x| in [a, b],

plus a point mass of ``(alpha - 1) / (alpha + 1)`` at 0 coming from the
forced zero eigenvalues.  ``q`` integrates to ``2 / (1 + alpha)``, so the
total mass is 1.

Interval masses are computed by adaptive quadrature after the edge
substitutions ``x = a + t**2`` / ``x = b - t**2``, which remove the
square-root behaviour at the support edges and let the integrator hit
tight absolute tolerances cheaply.

All functions here are pure; values are immutable and safe to share
between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

__all__ = [
    "LimitLaw",
    "Interval",
    "QuadratureError",
    "mp_density",
    "sym_density",
    "measure",
    "cdf",
]

#: target absolute error for interval masses
MASS_ABS_TOL = 1e-10

# quad is asked for more than MASS_ABS_TOL so the reported estimate,
# summed over up to four sub-segments, stays below the contract.
_QUAD_EPSABS = 1e-13
_QUAD_EPSREL = 1e-12


class QuadratureError(RuntimeError):
    """Quadrature failed to reach the required absolute tolerance."""


@dataclass(frozen=True)
class Interval:
    """Closed real interval ``[lo, hi]``."""

    lo: float
    hi: float

    def __post_init__(self):
        lo = float(self.lo)
        hi = float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("interval endpoints must be finite")
        if lo > hi:
            raise ValueError(f"empty interval: lo={lo} > hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    @property
    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class LimitLaw:
    """Symmetrized Marchenko-Pastur law with aspect ratio ``alpha >= 1``.

    Attributes
    ----------
    alpha : ratio of the two vertex-class sizes, ``m/n``.
    a, b : edges of the positive continuous support ``[a, b]``.
    atom0 : mass of the point at 0, ``(alpha - 1) / (alpha + 1)``.
    """

    alpha: float
    a: float = 0.0
    b: float = 0.0
    atom0: float = 0.0

    def __init__(self, alpha: float):
        alpha = float(alpha)
        if not math.isfinite(alpha) or alpha < 1.0:
            raise ValueError(f"aspect ratio must satisfy alpha >= 1, got {alpha}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "a", 1.0 - alpha ** -0.5)
        object.__setattr__(self, "b", 1.0 + alpha ** -0.5)
        object.__setattr__(self, "atom0", (alpha - 1.0) / (alpha + 1.0))

    @property
    def continuous_mass(self) -> float:
        """Total mass of the density part, ``2 / (1 + alpha)``."""
        return 2.0 / (1.0 + self.alpha)


def mp_density(x, alpha: float):
    """Marchenko-Pastur density at ``x`` (scalar or array).

    Zero outside the support ``[a**2, b**2]``; nonnegative everywhere.
    """
    law = LimitLaw(alpha)
    a2 = law.a * law.a
    b2 = law.b * law.b
    x_arr = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        inside = (x_arr >= a2) & (x_arr <= b2) & (x_arr > 0.0)
        rad = np.where(inside, (b2 - x_arr) * (x_arr - a2), 0.0)
        dens = np.where(
            inside,
            alpha / (2.0 * np.pi * np.where(inside, x_arr, 1.0)) * np.sqrt(rad),
            0.0,
        )
    if np.ndim(x) == 0:
        return float(dens)
    return dens


def sym_density(x, law: LimitLaw):
    """Density of the symmetrized law at ``x`` (scalar or array).

    Supported on ``a <= |x| <= b``; the atom at 0 is not part of the
    density.  For ``alpha = 1`` the support closes at 0 and the removable
    singularity is filled with its limit, so the function is continuous.
    """
    a, b, alpha = law.a, law.b, law.alpha
    x_arr = np.asarray(x, dtype=float)
    ax = np.abs(x_arr)
    inside = (ax >= a) & (ax <= b)
    with np.errstate(invalid="ignore", divide="ignore"):
        rad = np.where(inside, (b * b - x_arr * x_arr) * (x_arr * x_arr - a * a), 0.0)
        safe = np.where(inside & (ax > 0.0), ax, 1.0)
        dens = np.where(inside, alpha / ((1.0 + alpha) * np.pi * safe) * np.sqrt(rad), 0.0)
    if a == 0.0:
        # limit of q at 0: alpha/((1+alpha) pi) * b = b / (2 pi) for alpha = 1
        at_zero = inside & (ax == 0.0)
        dens = np.where(at_zero, alpha / ((1.0 + alpha) * np.pi) * b, dens)
    if np.ndim(x) == 0:
        return float(dens)
    return dens


def _positive_segment_mass(s: float, t: float, law: LimitLaw) -> tuple[float, float]:
    """Integrate the density over ``[s, t]`` intersected with ``[a, b]``.

    Splits at the support midpoint and substitutes ``x = a + u**2`` on the
    left half and ``x = b - u**2`` on the right half; both integrands are
    smooth, so plain Gauss-Kronrod converges fast.  Returns (mass, error
    estimate).
    """
    a, b = law.a, law.b
    s = max(s, a)
    t = min(t, b)
    if t <= s:
        return 0.0, 0.0
    c = 0.5 * (a + b)
    total = 0.0
    err = 0.0

    def near_a(u):
        return sym_density(a + u * u, law) * 2.0 * u

    def near_b(u):
        return sym_density(b - u * u, law) * 2.0 * u

    left_hi = min(t, c)
    if s < left_hi:
        val, e = quad(near_a, math.sqrt(s - a), math.sqrt(left_hi - a),
                      epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL, limit=200)
        total += val
        err += e
    right_lo = max(s, c)
    if right_lo < t:
        val, e = quad(near_b, math.sqrt(b - t), math.sqrt(b - right_lo),
                      epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL, limit=200)
        total += val
        err += e
    return total, err


def _continuous_mass(lo: float, hi: float, law: LimitLaw) -> float:
    """Mass of the continuous part over ``[lo, hi]`` (both sign branches)."""
    pos, e_pos = _positive_segment_mass(lo, hi, law)
    # negative branch by symmetry: q(-x) = q(x)
    neg, e_neg = _positive_segment_mass(-hi, -lo, law)
    err = e_pos + e_neg
    if err > MASS_ABS_TOL:
        raise QuadratureError(
            f"interval mass quadrature reached abs error {err:.3e} "
            f"(> {MASS_ABS_TOL:.0e}) on [{lo}, {hi}]"
        )
    return pos + neg


def measure(interval: Interval, law: LimitLaw) -> float:
    """Mass of the limit law on a closed interval (density + atom).

    Adaptive quadrature with absolute error below ``MASS_ABS_TOL``; the
    point mass at 0 counts whenever ``0 in [lo, hi]``.
    """
    total = _continuous_mass(interval.lo, interval.hi, law)
    if interval.contains_zero:
        total += law.atom0
    return min(max(total, 0.0), 1.0)


def cdf(x: float, law: LimitLaw) -> float:
    """Distribution function ``F(x)`` of the limit law.

    Monotone nondecreasing, 0 below ``-b``, 1 above ``b``; jumps by
    ``atom0`` at 0.
    """
    x = float(x)
    if math.isnan(x):
        raise ValueError("cdf argument must not be NaN")
    if x < -law.b:
        return 0.0
    if x >= law.b:
        return 1.0
    total = _continuous_mass(-law.b - 1.0, x, law)
    if x >= 0.0:
        total += law.atom0
    return min(max(total, 0.0), 1.0)
