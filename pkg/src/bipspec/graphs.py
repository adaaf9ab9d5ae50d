"""Bipartite graph ensembles: independent-edge and biregular sampling.

Two models produce the m x n 0/1 biadjacency matrix X:

* ``sample_er``      -- every edge present independently with probability p;
* ``sample_regular`` -- exact (d_left, d_right)-regular graphs, obtained by
  running a switch chain (random 2x2 alternating-rectangle swaps) from a
  deterministic block-circulant starting graph.

The switch chain has the uniform distribution over all biregular graphs as
its stationary law, but any finite run is only approximately uniform; every
experiment report carries that caveat.  Mixing defaults to
``10 * E * log(E)`` proposed switches for E = m * d_left edges.

Graphs are immutable after construction (the underlying arrays are marked
read-only) and samplers derive all randomness from explicit seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

__all__ = [
    "BipartiteGraph",
    "DegreeSpec",
    "DenseSymmetric",
    "EdgeListFormatError",
    "sample_er",
    "sample_regular",
    "is_regular",
    "normalized_regular",
    "normalized_er",
    "default_mixing_steps",
    "write_edge_list",
    "read_edge_list",
]

# proposals are drawn from the generator in fixed-size blocks so that the
# consumed random stream depends only on (seed, mixing_steps)
_PROPOSAL_CHUNK = 1 << 16


class EdgeListFormatError(ValueError):
    """Malformed edge-list file; the message carries the line number."""


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """0/1 biadjacency structure with m left and n right vertices."""

    m: int
    n: int
    X: np.ndarray

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("vertex counts must be >= 1")
        X = np.ascontiguousarray(self.X, dtype=np.uint8)
        if X.shape != (self.m, self.n):
            raise ValueError(f"biadjacency shape {X.shape} != ({self.m}, {self.n})")
        if not np.isin(X, (0, 1)).all():
            raise ValueError("biadjacency entries must be 0 or 1")
        X.flags.writeable = False
        object.__setattr__(self, "X", X)

    @property
    def edge_count(self) -> int:
        return int(self.X.sum())

    def edges(self) -> np.ndarray:
        """Edge pairs (i, j), row-major order, shape (edge_count, 2)."""
        return np.argwhere(self.X)

    def degrees_left(self) -> np.ndarray:
        return self.X.sum(axis=1, dtype=np.int64)

    def degrees_right(self) -> np.ndarray:
        return self.X.sum(axis=0, dtype=np.int64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return self.m == other.m and self.n == other.n and np.array_equal(self.X, other.X)

    def __repr__(self) -> str:
        return f"BipartiteGraph(m={self.m}, n={self.n}, edges={self.edge_count})"


@dataclass(frozen=True)
class DegreeSpec:
    """Target degrees: every left vertex d_left, every right vertex d_right."""

    d_left: int
    d_right: int

    def __post_init__(self):
        if self.d_left < 0 or self.d_right < 0:
            raise ValueError("degrees must be nonnegative")

    def validate_for(self, m: int, n: int) -> None:
        """Raise if no (d_left, d_right)-regular graph on (m, n) exists."""
        if self.d_left > n:
            raise ValueError(f"d_left={self.d_left} exceeds right class size {n}")
        if self.d_right > m:
            raise ValueError(f"d_right={self.d_right} exceeds left class size {m}")
        if m * self.d_left != n * self.d_right:
            raise ValueError(
                f"handshake fails: m*d_left={m * self.d_left} != n*d_right={n * self.d_right}"
            )


@dataclass(frozen=True, eq=False)
class DenseSymmetric:
    """Symmetric (m+n) x (m+n) matrix with zero diagonal blocks.

    Only the upper-right m x n block is stored; ``entries`` materializes
    the full block form, which is exactly symmetric by construction.
    """

    m: int
    n: int
    block: np.ndarray

    def __post_init__(self):
        B = np.ascontiguousarray(self.block, dtype=np.float64)
        if B.shape != (self.m, self.n):
            raise ValueError(f"block shape {B.shape} != ({self.m}, {self.n})")
        B.flags.writeable = False
        object.__setattr__(self, "block", B)

    @property
    def size(self) -> int:
        return self.m + self.n

    @property
    def entries(self) -> np.ndarray:
        full = np.zeros((self.size, self.size), dtype=np.float64)
        full[: self.m, self.m:] = self.block
        full[self.m:, : self.m] = self.block.T
        return full


def sample_er(m: int, n: int, p: float, seed: int) -> BipartiteGraph:
    """Independent-edge bipartite graph: each edge present with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must be in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    X = (rng.random((m, n)) < p).astype(np.uint8)
    return BipartiteGraph(m, n, X)


def default_mixing_steps(m: int, d_left: int) -> int:
    """Default switch count: 10 * E * log(E) for E = m * d_left edges."""
    edges = m * d_left
    if edges < 2:
        return 0
    return int(math.ceil(10.0 * edges * math.log(edges)))


def _circulant_regular(m: int, n: int, d_left: int) -> np.ndarray:
    """Deterministic (d_left, m*d_left/n)-regular starting graph.

    Left vertex i takes the d_left consecutive right indices starting at
    i*d_left (mod n).  Walking i = 0..m-1 lays down indices
    0, 1, ..., m*d_left - 1 (mod n), so every right vertex receives exactly
    m*d_left/n edges; consecutive blocks of length d_left <= n never repeat
    a column within a row.
    """
    X = np.zeros((m, n), dtype=np.uint8)
    if d_left == 0:
        return X
    cols = (np.arange(m, dtype=np.int64)[:, None] * d_left + np.arange(d_left)) % n
    X[np.repeat(np.arange(m), d_left), cols.ravel()] = 1
    return X


def _apply_switches_py(flat, rows, cols, e1s, e2s, n):
    """Pure-python switch kernel; semantics identical to the jitted one."""
    accepted = 0
    for e1, e2 in zip(e1s.tolist(), e2s.tolist()):
        i1 = rows[e1]
        j1 = cols[e1]
        i2 = rows[e2]
        j2 = cols[e2]
        if i1 == i2 or j1 == j2:
            continue
        if flat[i1 * n + j2] or flat[i2 * n + j1]:
            continue
        flat[i1 * n + j1] = 0
        flat[i2 * n + j2] = 0
        flat[i1 * n + j2] = 1
        flat[i2 * n + j1] = 1
        cols[e1] = j2
        cols[e2] = j1
        accepted += 1
    return accepted


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _apply_switches_nb(flat, rows, cols, e1s, e2s, n):  # pragma: no cover - jitted
        accepted = 0
        for t in range(e1s.shape[0]):
            e1 = e1s[t]
            e2 = e2s[t]
            i1 = rows[e1]
            j1 = cols[e1]
            i2 = rows[e2]
            j2 = cols[e2]
            if i1 == i2 or j1 == j2:
                continue
            if flat[i1 * n + j2] or flat[i2 * n + j1]:
                continue
            flat[i1 * n + j1] = 0
            flat[i2 * n + j2] = 0
            flat[i1 * n + j2] = 1
            flat[i2 * n + j1] = 1
            cols[e1] = j2
            cols[e2] = j1
            accepted += 1
        return accepted


def _run_switch_chain(X: np.ndarray, n: int, steps: int, rng: np.random.Generator,
                      use_numba: bool) -> int:
    """Propose ``steps`` switches on X in place; returns the accepted count.

    Proposals are ordered pairs of edge slots drawn uniformly; invalid
    proposals (shared endpoint or occupied diagonal) are skipped, which
    keeps the chain symmetric and hence uniform in the limit.
    """
    edges = np.argwhere(X)
    n_edges = len(edges)
    if n_edges < 2 or steps <= 0:
        return 0
    rows_a = np.ascontiguousarray(edges[:, 0], dtype=np.int64)
    cols_a = np.ascontiguousarray(edges[:, 1], dtype=np.int64)
    accepted = 0
    if use_numba:
        flat = X.reshape(-1)
        done = 0
        while done < steps:
            k = min(_PROPOSAL_CHUNK, steps - done)
            props = rng.integers(0, n_edges, size=(k, 2), dtype=np.int64)
            accepted += _apply_switches_nb(
                flat, rows_a, cols_a,
                np.ascontiguousarray(props[:, 0]), np.ascontiguousarray(props[:, 1]), n,
            )
            done += k
    else:
        flat = bytearray(X.reshape(-1).tobytes())
        rows_l = rows_a.tolist()
        cols_l = cols_a.tolist()
        done = 0
        while done < steps:
            k = min(_PROPOSAL_CHUNK, steps - done)
            props = rng.integers(0, n_edges, size=(k, 2), dtype=np.int64)
            accepted += _apply_switches_py(flat, rows_l, cols_l, props[:, 0], props[:, 1], n)
            done += k
        X.reshape(-1)[:] = np.frombuffer(bytes(flat), dtype=np.uint8)
    return accepted


def sample_regular(m: int, n: int, spec: DegreeSpec, seed: int,
                   mixing_steps: int | None = None) -> BipartiteGraph:
    """Approximately uniform (d_left, d_right)-regular bipartite graph.

    Starts from the block-circulant witness and performs ``mixing_steps``
    random switch proposals (default ``default_mixing_steps``).  Every
    output is exactly regular; uniformity over the ensemble holds only in
    the long-chain limit.
    """
    spec.validate_for(m, n)
    if mixing_steps is None:
        mixing_steps = default_mixing_steps(m, spec.d_left)
    if mixing_steps < 0:
        raise ValueError("mixing_steps must be >= 0")
    X = _circulant_regular(m, n, spec.d_left)
    # d_left in {0, n} admits a single graph; no move is ever valid
    if 0 < spec.d_left < n:
        rng = np.random.default_rng(seed)
        _run_switch_chain(X, n, mixing_steps, rng, use_numba=_HAVE_NUMBA)
    return BipartiteGraph(m, n, X)


def is_regular(g: BipartiteGraph, spec: DegreeSpec) -> bool:
    """True iff every left degree is d_left and every right degree d_right."""
    return bool(
        (g.degrees_left() == spec.d_left).all()
        and (g.degrees_right() == spec.d_right).all()
    )


def normalized_regular(g: BipartiteGraph, spec: DegreeSpec) -> DenseSymmetric:
    """Centered and variance-normalized block matrix of a regular graph.

    Upper-right block ``(X - d_left/n) / sqrt((d_left/n) (1 - d_left/n))``;
    the subtracted constant is the edge density, so block row sums vanish.
    """
    if spec.d_left in (0, g.n):
        raise ValueError("degenerate density d_left/n in {0, 1}: normalization undefined")
    if not is_regular(g, spec):
        raise ValueError("graph is not regular with the given degrees")
    dens = spec.d_left / g.n
    block = (g.X.astype(np.float64) - dens) / math.sqrt(dens * (1.0 - dens))
    return DenseSymmetric(g.m, g.n, block)


def normalized_er(g: BipartiteGraph, p: float) -> DenseSymmetric:
    """Entrywise standardization ``(X - p) / sqrt(p (1 - p))`` in block form."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"normalization needs 0 < p < 1, got {p}")
    block = (g.X.astype(np.float64) - p) / math.sqrt(p * (1.0 - p))
    return DenseSymmetric(g.m, g.n, block)


def write_edge_list(g: BipartiteGraph, path) -> None:
    """Write the text edge-list format: header ``m n``, then ``i j`` lines.

    Edges are emitted in row-major order, 0-based, LF-terminated.
    """
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{g.m} {g.n}\n")
        for i, j in g.edges():
            fh.write(f"{i} {j}\n")


def read_edge_list(path) -> BipartiteGraph:
    """Parse the edge-list format back into a graph.

    Raises :class:`EdgeListFormatError` with a 1-based line number on any
    malformed, out-of-range, or duplicate entry.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise EdgeListFormatError("line 1: missing 'm n' header")
    head = lines[0].split()
    if len(head) != 2:
        raise EdgeListFormatError("line 1: header must be 'm n'")
    try:
        m, n = int(head[0]), int(head[1])
    except ValueError:
        raise EdgeListFormatError("line 1: header values must be decimal integers") from None
    if m < 1 or n < 1:
        raise EdgeListFormatError("line 1: vertex counts must be >= 1")
    X = np.zeros((m, n), dtype=np.uint8)
    for lineno, raw in enumerate(lines[1:], start=2):
        parts = raw.split()
        if len(parts) != 2:
            raise EdgeListFormatError(f"line {lineno}: expected 'i j', got {raw!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListFormatError(
                f"line {lineno}: indices must be decimal integers, got {raw!r}"
            ) from None
        if not (0 <= i < m and 0 <= j < n):
            raise EdgeListFormatError(f"line {lineno}: edge ({i}, {j}) out of range")
        if X[i, j]:
            raise EdgeListFormatError(f"line {lineno}: duplicate edge ({i}, {j})")
        X[i, j] = 1
    return BipartiteGraph(m, n, X)
