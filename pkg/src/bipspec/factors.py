"""Degree-constrained subgraphs (f-factors) of bipartite graphs.

Two independent routes decide whether a graph contains a subgraph with
prescribed degrees ``f_left(u)`` / ``f_right(v)``:

* ``ore_ryser_check`` evaluates the Ore-Ryser subset criterion
  ``sum_v min(f_right(v), d_S(v)) >= sum_{u in S} f_left(u)`` for every
  subset S of the left class, exactly as stated.  Exponential in the left
  class size, so it is capped at 22 vertices.
* ``find_f_factor`` reduces to maximum flow (source -> left with capacity
  f_left, unit edge arcs, right -> sink with capacity f_right) and, when
  the demands are met, extracts the witness subgraph.

The subset criterion alone does not see demand imbalance (a star with
all-ones demands satisfies it while no factor exists), so balance
``sum f_left == sum f_right`` is handled separately: the flow route
reports "unbalanced" and the cross-validation tests quantify only over
balanced demand vectors.

Augmenting paths are explored in ascending vertex/edge index order, so
the returned factor is deterministic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .graphs import BipartiteGraph

__all__ = [
    "FactorSpec",
    "FactorOutcome",
    "SubsetEnumerationLimit",
    "ore_ryser_check",
    "find_f_factor",
    "regular_factor_check",
]

#: largest left class for which the 2^m subset enumeration is allowed
ORE_RYSER_MAX_LEFT = 22


class SubsetEnumerationLimit(ValueError):
    """Left class too large for exhaustive subset checking."""


@dataclass(frozen=True)
class FactorSpec:
    """Per-vertex degree demands for a factor; nonnegative integers."""

    f_left: tuple[int, ...]
    f_right: tuple[int, ...]

    def __post_init__(self):
        def as_int(v):
            iv = int(v)
            if iv != v:
                raise ValueError(f"factor demand {v!r} is not an integer")
            if iv < 0:
                raise ValueError("factor demands must be nonnegative")
            return iv

        object.__setattr__(self, "f_left", tuple(as_int(v) for v in self.f_left))
        object.__setattr__(self, "f_right", tuple(as_int(v) for v in self.f_right))

    @property
    def balanced(self) -> bool:
        return sum(self.f_left) == sum(self.f_right)

    def validate_for(self, g: BipartiteGraph) -> None:
        if len(self.f_left) != g.m or len(self.f_right) != g.n:
            raise ValueError(
                f"demand lengths ({len(self.f_left)}, {len(self.f_right)}) "
                f"do not match graph ({g.m}, {g.n})"
            )


@dataclass(frozen=True)
class FactorOutcome:
    """Result of a factor search: the witness subgraph or a reason code."""

    factor: BipartiteGraph | None
    reason: str  # "found" | "unbalanced" | "no_factor"

    def __bool__(self) -> bool:
        return self.factor is not None


def ore_ryser_check(g: BipartiteGraph, spec: FactorSpec) -> bool:
    """Evaluate the subset criterion over all subsets of the left class.

    Subsets are walked in Gray-code order so each step updates the
    neighbourhood degree vector by a single row.  Balance is NOT part of
    the criterion; see the module docstring.
    """
    spec.validate_for(g)
    if g.m > ORE_RYSER_MAX_LEFT:
        raise SubsetEnumerationLimit(
            f"left class size {g.m} exceeds the exhaustive limit "
            f"{ORE_RYSER_MAX_LEFT}; use find_f_factor instead"
        )
    rows = g.X.astype(np.int64)
    f_left = np.asarray(spec.f_left, dtype=np.int64)
    f_right = np.asarray(spec.f_right, dtype=np.int64)
    d_s = np.zeros(g.n, dtype=np.int64)
    demand = 0
    gray_prev = 0
    for k in range(1, 1 << g.m):
        gray = k ^ (k >> 1)
        bit = (gray ^ gray_prev).bit_length() - 1
        if gray > gray_prev:
            d_s += rows[bit]
            demand += f_left[bit]
        else:
            d_s -= rows[bit]
            demand -= f_left[bit]
        gray_prev = gray
        if int(np.minimum(f_right, d_s).sum()) < demand:
            return False
    return True


class _Dinic:
    """Unit-friendly Dinic max-flow on a fixed arc list."""

    def __init__(self, n_nodes: int):
        self.n_nodes = n_nodes
        self.head: list[list[int]] = [[] for _ in range(n_nodes)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_arc(self, u: int, v: int, capacity: int) -> int:
        idx = len(self.to)
        self.head[u].append(idx)
        self.to.append(v)
        self.cap.append(capacity)
        self.head[v].append(idx + 1)
        self.to.append(u)
        self.cap.append(0)
        return idx

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        INF = 1 << 60
        while True:
            level = [-1] * self.n_nodes
            level[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for idx in self.head[u]:
                    v = self.to[idx]
                    if self.cap[idx] > 0 and level[v] < 0:
                        level[v] = level[u] + 1
                        queue.append(v)
            if level[t] < 0:
                return flow
            it = [0] * self.n_nodes

            def dfs(u: int, pushed: int) -> int:
                if u == t:
                    return pushed
                while it[u] < len(self.head[u]):
                    idx = self.head[u][it[u]]
                    v = self.to[idx]
                    if self.cap[idx] > 0 and level[v] == level[u] + 1:
                        got = dfs(v, min(pushed, self.cap[idx]))
                        if got:
                            self.cap[idx] -= got
                            self.cap[idx ^ 1] += got
                            return got
                    it[u] += 1
                return 0

            while True:
                pushed = dfs(s, INF)
                if not pushed:
                    break
                flow += pushed


def find_f_factor(g: BipartiteGraph, spec: FactorSpec) -> FactorOutcome:
    """Search for a subgraph realizing the demands via maximum flow.

    Returns the witness graph when the flow saturates the total demand,
    ``reason="unbalanced"`` when the demand sums differ (no flow is run),
    and ``reason="no_factor"`` otherwise.
    """
    spec.validate_for(g)
    if not spec.balanced:
        return FactorOutcome(None, "unbalanced")
    total = sum(spec.f_left)
    if total == 0:
        empty = BipartiteGraph(g.m, g.n, np.zeros((g.m, g.n), dtype=np.uint8))
        return FactorOutcome(empty, "found")
    m, n = g.m, g.n
    source, sink = m + n, m + n + 1
    net = _Dinic(m + n + 2)
    for u in range(m):
        if spec.f_left[u]:
            net.add_arc(source, u, spec.f_left[u])
    edge_arcs: list[tuple[int, int, int]] = []
    for u, v in g.edges():
        edge_arcs.append((int(u), int(v), net.add_arc(int(u), m + int(v), 1)))
    for v in range(n):
        if spec.f_right[v]:
            net.add_arc(m + v, sink, spec.f_right[v])
    if net.max_flow(source, sink) < total:
        return FactorOutcome(None, "no_factor")
    Y = np.zeros((m, n), dtype=np.uint8)
    for u, v, idx in edge_arcs:
        if net.cap[idx] == 0:  # unit arc fully used
            Y[u, v] = 1
    return FactorOutcome(BipartiteGraph(m, n, Y), "found")


def regular_factor_check(g: BipartiteGraph, x: int, y: int) -> bool:
    """Does g contain a spanning subgraph with constant degrees (x, y)?

    Demands must balance: ``m * x == n * y``.
    """
    x, y = int(x), int(y)
    if x < 0 or y < 0:
        raise ValueError("constant demands must be nonnegative")
    if g.m * x != g.n * y:
        raise ValueError(f"unbalanced constant demands: m*x={g.m * x} != n*y={g.n * y}")
    spec = FactorSpec((x,) * g.m, (y,) * g.n)
    return find_f_factor(g, spec).factor is not None
