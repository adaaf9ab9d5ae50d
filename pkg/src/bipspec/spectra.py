"""Spectra of bipartite block matrices and window trace statistics.

The symmetric block matrix ``(0 X; X^T 0)`` has eigenvalues
``{-sigma_i} u {0 x (m-n)} u {+sigma_i}`` where sigma_i are the singular
values of X, so full spectra are assembled from an SVD of the smaller
side instead of an (m+n)-dimensional eigensolve.  A dense eigensolve of
the materialized block form is kept around only as a test oracle.

``WindowPair`` builds the convex piecewise-linear window functions whose
trace statistics sandwich the eigenvalue count of an interval: the
"bump" (outer minus inner function) equals 1 on a plateau interval, 0
outside a cover interval, and ramps linearly in between, giving

    count(plateau) <= sum_i bump(lambda_i) <= count(cover)

exactly, with no floating-point tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mplaw import Interval

__all__ = [
    "Spectrum",
    "WindowPair",
    "singular_values",
    "bipartite_spectrum",
    "count_in_interval",
    "trace_statistic",
    "window_pair",
    "write_spectrum_csv",
]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Sorted eigenvalue list plus the multiplicative scale applied to it."""

    values: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("spectrum must be one-dimensional")
        if not np.isfinite(v).all():
            raise ValueError("spectrum contains non-finite values")
        if np.any(np.diff(v) < 0):
            raise ValueError("spectrum values must be sorted ascending")
        if not (self.scale > 0):
            raise ValueError("scale must be positive")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def scaled_values(self) -> np.ndarray:
        return self.values * self.scale


def singular_values(X) -> np.ndarray:
    """Singular values of an m x n matrix with m >= n, sorted ascending.

    Computed by LAPACK's bidiagonalization SVD; relative accuracy is far
    below 1e-8 at the dense sizes used here.
    """
    A = np.asarray(X, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError("expected a nonempty 2-d matrix")
    if A.shape[0] < A.shape[1]:
        raise ValueError(f"need m >= n, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError("matrix contains non-finite entries")
    return np.linalg.svd(A, compute_uv=False)[::-1].copy()


def bipartite_spectrum(X, scale: float = 1.0) -> Spectrum:
    """Full (m+n)-eigenvalue spectrum of the block form of X.

    The matrix is oriented so the wide side is first (the block spectrum
    is invariant under transposing X); |m - n| exact zeros sit between
    the paired +/- singular values.
    """
    A = np.asarray(X, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if A.shape[0] < A.shape[1]:
        A = A.T
    sv = singular_values(A)
    zeros = np.zeros(A.shape[0] - A.shape[1], dtype=np.float64)
    values = np.concatenate([-sv[::-1], zeros, sv])
    return Spectrum(values, scale)


def count_in_interval(s: Spectrum, interval: Interval) -> int:
    """Exact number of (scaled) eigenvalues in the closed interval."""
    v = s.scaled_values
    lo = np.searchsorted(v, interval.lo, side="left")
    hi = np.searchsorted(v, interval.hi, side="right")
    return int(hi - lo)


def trace_statistic(s: Spectrum, f: Callable) -> float:
    """Sum of f over all (scaled) eigenvalues."""
    v = s.scaled_values
    try:
        out = np.asarray(f(v), dtype=np.float64)
        if out.shape == v.shape:
            return float(out.sum())
    except (TypeError, ValueError):
        pass
    return float(sum(f(float(x)) for x in v))


def _hinge(x, lo: float, hi: float, slope: float):
    """Convex hinge: 0 on [lo, hi], rising with +-slope outside."""
    x = np.asarray(x, dtype=float)
    return slope * np.maximum(0.0, np.maximum(lo - x, x - hi))


@dataclass(frozen=True)
class WindowPair:
    """Convex window functions sandwiching an interval eigenvalue count.

    ``kind="upper"`` bounds the count from above: the bump is 1 on the
    interval itself and spills onto flanks of width ``length/ratio``.
    ``kind="lower"`` bounds it from below: the bump is supported inside
    the interval and is 1 only on the core shrunk by one flank per side
    (requires ``ratio > 2``).

    Both window functions are convex and Lipschitz with constant
    ``slope = ratio / length``.
    """

    interval: Interval
    ratio: float
    kind: str
    plateau: Interval  # bump == 1 here
    cover: Interval    # bump == 0 outside

    @property
    def flank(self) -> float:
        return self.interval.length / self.ratio

    @property
    def slope(self) -> float:
        return self.ratio / self.interval.length

    def outer(self, x):
        """Hinge vanishing on the cover; the first function of the pair."""
        return _hinge(x, self.cover.lo, self.cover.hi, self.slope)

    def inner(self, x):
        """Hinge over the plateau shifted down to -1; the second function."""
        return _hinge(x, self.plateau.lo, self.plateau.hi, self.slope) - 1.0

    def bump(self, x):
        """outer - inner as exact piecewise-linear arithmetic.

        Region membership is decided by comparisons, so the value is
        exactly 1.0 on the (closed) plateau and exactly 0.0 outside the
        (open) cover; the ramps are clipped into [0, 1].
        """
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=float)
        p, c = self.plateau, self.cover
        out[(x >= p.lo) & (x <= p.hi)] = 1.0
        left = (x > c.lo) & (x < p.lo)
        out[left] = np.clip((x[left] - c.lo) * self.slope, 0.0, 1.0)
        right = (x > p.hi) & (x < c.hi)
        out[right] = np.clip((c.hi - x[right]) * self.slope, 0.0, 1.0)
        if out.ndim == 0:
            return float(out)
        return out


def window_pair(interval: Interval, ratio: float, kind: str = "upper") -> WindowPair:
    """Build the window pair for an interval with flank ratio ``ratio``.

    ``ratio`` divides the interval length to give the flank width; the
    lower kind needs ``ratio > 2`` so the shrunk core stays nonempty.
    """
    if interval.length <= 0:
        raise ValueError("window interval must have positive length")
    if ratio <= 0:
        raise ValueError("flank ratio must be positive")
    w = interval.length / ratio
    if kind == "upper":
        plateau = interval
        cover = Interval(interval.lo - w, interval.hi + w)
    elif kind == "lower":
        if ratio <= 2:
            raise ValueError("lower windows need ratio > 2")
        plateau = Interval(interval.lo + w, interval.hi - w)
        cover = interval
    else:
        raise ValueError(f"kind must be 'upper' or 'lower', got {kind!r}")
    return WindowPair(interval, float(ratio), kind, plateau, cover)


def write_spectrum_csv(s: Spectrum, path) -> None:
    """Dump scaled eigenvalues as ``index,eigenvalue`` CSV, full precision."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("index,eigenvalue\n")
        for i, v in enumerate(s.scaled_values):
            fh.write(f"{i},{v:.17g}\n")
