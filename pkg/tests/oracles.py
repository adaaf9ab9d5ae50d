"""Independent reference implementations used to freeze expected values.

Everything here is deliberately written along a different route than the
package code: densities are coded via the square-root pushforward instead
of the direct closed form, masses use mpmath's tanh-sinh integrator instead
of Gauss-Kronrod, factor existence enumerates edge subsets instead of
running flow, and block spectra come from a dense eigensolve of the full
(m+n) matrix instead of an SVD of one block.
"""

from __future__ import annotations

import itertools

import mpmath as mp
import numpy as np

mp.mp.dps = 30


def mp_density_reference(u, alpha):
    """Marchenko-Pastur density, coded directly from the closed form."""
    a = 1 - mp.mpf(alpha) ** mp.mpf(-0.5)
    b = 1 + mp.mpf(alpha) ** mp.mpf(-0.5)
    u = mp.mpf(u)
    if u < a * a or u > b * b or u <= 0:
        return mp.mpf(0)
    return alpha / (2 * mp.pi * u) * mp.sqrt((b * b - u) * (u - a * a))


def sym_density_reference(x, alpha):
    """Symmetrized density via the pushforward form 2|x| p(x^2) / (1+alpha)."""
    x = mp.mpf(x)
    if x == 0:
        return mp.mpf(0)
    return 2 * abs(x) / (1 + mp.mpf(alpha)) * mp_density_reference(x * x, alpha)


def law_mass_reference(lo, hi, alpha, include_atom=True):
    """Mass of the symmetrized law on [lo, hi] by tanh-sinh quadrature."""
    a = float(1 - alpha ** -0.5)
    b = float(1 + alpha ** -0.5)
    total = mp.mpf(0)
    for seg_lo, seg_hi in ((-b, -a), (a, b)):
        s, t = max(lo, seg_lo), min(hi, seg_hi)
        if t > s:
            total += mp.quad(lambda x: sym_density_reference(x, alpha), [s, t])
    if include_atom and lo <= 0 <= hi:
        total += (mp.mpf(alpha) - 1) / (mp.mpf(alpha) + 1)
    return float(total)


def count_regular_bit_matrices(m, n, d_left, d_right):
    """Exhaustively count m x n 0/1 matrices with constant line sums."""
    if m * n > 20:
        raise ValueError("exhaustive enumeration capped at 20 cells")
    count = 0
    for bits in range(1 << (m * n)):
        a = np.array([(bits >> k) & 1 for k in range(m * n)], dtype=np.int64)
        a = a.reshape(m, n)
        if (a.sum(axis=1) == d_left).all() and (a.sum(axis=0) == d_right).all():
            count += 1
    return count


def factor_exists_bruteforce(X, f_left, f_right) -> bool:
    """Enumerate edge subsets and test the degree sequence directly."""
    X = np.asarray(X)
    edges = np.argwhere(X)
    if len(edges) > 18:
        raise ValueError("edge-subset enumeration capped at 18 edges")
    m, n = X.shape
    for keep in itertools.product((0, 1), repeat=len(edges)):
        dl = np.zeros(m, dtype=int)
        dr = np.zeros(n, dtype=int)
        for flag, (i, j) in zip(keep, edges):
            if flag:
                dl[i] += 1
                dr[j] += 1
        if (dl == np.asarray(f_left)).all() and (dr == np.asarray(f_right)).all():
            return True
    return False


def block_eigenvalues(block) -> np.ndarray:
    """Eigenvalues of the full symmetric (m+n) block matrix, ascending."""
    block = np.asarray(block, dtype=float)
    m, n = block.shape
    full = np.zeros((m + n, m + n))
    full[:m, m:] = block
    full[m:, :m] = block.T
    return np.linalg.eigvalsh(full)


def semicircle_density(x):
    """Wigner semicircle density on [-2, 2]."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= 2.0
    return np.where(inside, np.sqrt(np.where(inside, 4.0 - x * x, 0.0)) / (2.0 * np.pi), 0.0)
