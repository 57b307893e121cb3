"""Metric instances over a base graph, tours, lower bounds and the exact oracle."""

from __future__ import annotations

import math
from collections import OrderedDict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .graph import SimpleGraph

GRAPHIC = "graphic"
ONETWO = "onetwo"
KINDS = (GRAPHIC, ONETWO)

DENSE_LIMIT = 5000
ORACLE_CAP = 16


class DisconnectedGraphError(ValueError):
    pass


class InvalidTourError(ValueError):
    pass


class OracleSizeError(ValueError):
    pass


@dataclass(eq=False)
class MetricInstance:
    """Graphic (shortest-path) or (1,2) metric induced by ``base``.

    Graphic distances come from BFS over the unweighted base graph; a full
    matrix is kept up to ``DENSE_LIMIT`` nodes, otherwise rows are computed on
    demand and cached.  (1,2) distances are 1 on base edges and 2 elsewhere.
    """

    kind: str
    base: SimpleGraph
    _rows: OrderedDict = field(default_factory=OrderedDict, repr=False)

    @property
    def n(self) -> int:
        return self.base.node_count

    @cached_property
    def matrix(self) -> np.ndarray | None:
        n = self.n
        if n > DENSE_LIMIT:
            return None
        if self.kind == ONETWO:
            d = np.full((n, n), 2, dtype=np.int64)
            for u, v in self.base.edges:
                d[u, v] = d[v, u] = 1
            np.fill_diagonal(d, 0)
            return d
        return _graphic_matrix(self.base)

    def row(self, u: int) -> np.ndarray:
        m = self.matrix
        if m is not None:
            return m[u]
        if u not in self._rows:
            if self.kind == ONETWO:
                r = np.full(self.n, 2, dtype=np.int64)
                r[list(self.base.neighbors(u))] = 1
                r[u] = 0
            else:
                r = _bfs_row(self.base, u)
            self._rows[u] = r
            if len(self._rows) > 256:
                self._rows.popitem(last=False)
        return self._rows[u]

    def dist(self, u: int, v: int) -> int:
        if self.kind == ONETWO:
            if u == v:
                return 0
            return 1 if self.base.has_edge(u, v) else 2
        return int(self.row(u)[v])


def _graphic_matrix(g: SimpleGraph) -> np.ndarray:
    n = g.node_count
    if g.edges:
        e = np.array(g.sorted_edges(), dtype=np.int64)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    d = shortest_path(adj, method="D", directed=False, unweighted=True)
    return d.astype(np.int64)


def _bfs_row(g: SimpleGraph, s: int) -> np.ndarray:
    d = np.full(g.node_count, -1, dtype=np.int64)
    d[s] = 0
    q = deque([s])
    while q:
        u = q.popleft()
        for w in g.adjacency[u]:
            if d[w] < 0:
                d[w] = d[u] + 1
                q.append(w)
    return d


def build_instance(g: SimpleGraph, kind: str) -> MetricInstance:
    if kind not in KINDS:
        raise ValueError(f"unknown metric kind {kind!r}; expected one of {KINDS}")
    if kind == GRAPHIC and not g.is_connected():
        raise DisconnectedGraphError("graphic metric needs a connected base graph")
    return MetricInstance(kind, g)


@dataclass(frozen=True)
class Tour:
    order: tuple[int, ...]
    cost: int

    def edges(self) -> list[tuple[int, int]]:
        n = len(self.order)
        return [(self.order[i], self.order[(i + 1) % n]) for i in range(n)]

    def to_dict(self) -> dict:
        return {"order": list(self.order), "cost": self.cost}


def tour_cost(inst: MetricInstance, order: Sequence[int]) -> Tour:
    order = tuple(int(v) for v in order)
    if sorted(order) != list(range(inst.n)):
        raise InvalidTourError(f"order is not a permutation of 0..{inst.n - 1}")
    n = len(order)
    cost = sum(inst.dist(order[i], order[(i + 1) % n]) for i in range(n))
    return Tour(order, cost)


def node_costs(inst: MetricInstance, tour: Tour) -> list[float]:
    """Half the cost of the two tour edges at each node, indexed by node id."""
    n = len(tour.order)
    out = [0.0] * n
    for i, v in enumerate(tour.order):
        out[v] = 0.5 * (inst.dist(tour.order[i - 1], v) + inst.dist(v, tour.order[(i + 1) % n]))
    return out


def validate_tour(inst: MetricInstance, tour: Tour) -> None:
    recomputed = tour_cost(inst, tour.order)
    if recomputed.cost != tour.cost:
        raise InvalidTourError(f"stated cost {tour.cost} but the order costs {recomputed.cost}")


def exact_optimum(inst: MetricInstance, cap: int = ORACLE_CAP) -> Tour:
    """Optimal tour by the subset dynamic programme (Held-Karp recurrence).

    Among optimal tours the lexicographically smallest order starting at node 0
    is returned.
    """
    n = inst.n
    if n > cap:
        raise OracleSizeError(f"exact oracle is capped at {cap} nodes, instance has {n}")
    if n <= 3:
        return tour_cost(inst, range(n))
    d = np.array([inst.row(u) for u in range(n)], dtype=np.int64)
    m = n - 1
    inner = d[1:, 1:]
    full = (1 << m) - 1
    inf = np.iinfo(np.int64).max // 4
    dp = np.full((1 << m, m), inf, dtype=np.int64)
    for j in range(m):
        dp[1 << j, j] = d[0, j + 1]

    masks = np.arange(1 << m, dtype=np.int64)
    popcount = np.zeros(1 << m, dtype=np.int64)
    for j in range(m):
        popcount += (masks >> j) & 1
    bits = 1 << np.arange(m, dtype=np.int64)

    for size in range(1, m):
        layer = masks[popcount == size]
        # best[i, j]: cheapest path from 0 through layer[i] ending next at j
        best = (dp[layer][:, :, None] + inner[None, :, :]).min(axis=1)
        for j in range(m):
            sel = (layer & bits[j]) == 0
            dp[layer[sel] | bits[j], j] = best[sel, j]

    opt = int((dp[full] + d[1:, 0]).min())

    order = [0]
    cur, rest, acc = 0, full, 0
    while rest:
        for j in range(m):
            if rest & (1 << j) and acc + d[cur, j + 1] + dp[rest, j] == opt:
                acc += int(d[cur, j + 1])
                cur = j + 1
                rest ^= 1 << j
                order.append(cur)
                break
        else:  # pragma: no cover - the table always contains a witness
            raise RuntimeError("optimal tour reconstruction failed")
    tour = tour_cost(inst, order)
    assert tour.cost == opt
    return tour


@dataclass(frozen=True)
class InstanceLowerBound:
    value: int
    n: int
    half_deg1: float
    cover_k: int | None = None


def instance_lower_bound(inst: MetricInstance, cover=None) -> InstanceLowerBound:
    """``max(n, n + ceil(d1/2), n + k)`` with ``d1`` the number of degree-1
    nodes of the base graph and ``k`` the 2-edge count of an optimal cycle
    cover (only for (1,2) instances)."""
    n = inst.n
    d1 = int(np.count_nonzero(inst.base.degrees() == 1))
    k = None
    if cover is not None:
        if inst.kind != ONETWO:
            raise ValueError("cycle-cover bound only applies to (1,2) instances")
        covered = sorted(v for c in cover.cycles for v in c)
        if covered != list(range(n)):
            raise ValueError("cover does not partition the instance's node set")
        k = cover.k
    if n < 3:
        # a 1- or 2-node tour reuses its only edge, so the degree-1 argument fails
        value = tour_cost(inst, range(n)).cost
    else:
        value = max(n, n + math.ceil(d1 / 2), n + (k or 0))
    return InstanceLowerBound(value, n, d1 / 2, k)
