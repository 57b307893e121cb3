"""Graphic TSP: MST doubling, Christofides, and the removable-pairing bound.

All spanning trees are BFS trees from node 0 (every graphic edge has unit
weight, so any spanning tree is minimum).  Children are always visited in
increasing id, which makes every routine deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import networkx as nx
import numpy as np

from .graph import SimpleGraph, bfs_order
from .matching import min_weight_perfect_matching
from .metric import GRAPHIC, MetricInstance, Tour, tour_cost

Edge = tuple[int, int]


def _e(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def _require_graphic(inst: MetricInstance) -> None:
    if inst.kind != GRAPHIC:
        raise ValueError(f"graphic algorithm applied to a {inst.kind!r} instance")


def bfs_tree(g: SimpleGraph, root: int = 0) -> list[int]:
    """Parent array of the BFS tree from ``root`` (root's parent is -1)."""
    parent = [-1] * g.node_count
    seen = [False] * g.node_count
    seen[root] = True
    for u in bfs_order(g, root):
        for w in g.adjacency[u]:
            if not seen[w]:
                seen[w] = True
                parent[w] = u
    return parent


def _preorder(children: list[list[int]], root: int) -> list[int]:
    out, stack = [], [root]
    while stack:
        u = stack.pop()
        out.append(u)
        stack.extend(reversed(children[u]))
    return out


def mst_double_tour(inst: MetricInstance) -> Tour:
    """Double a spanning tree, walk it, shortcut repeats.

    Shortcutting the doubled Euler walk by first occurrence is exactly the
    preorder of the tree.
    """
    _require_graphic(inst)
    n = inst.n
    if n == 0:
        return Tour((), 0)
    parent = bfs_tree(inst.base)
    children: list[list[int]] = [[] for _ in range(n)]
    for v, p in enumerate(parent):
        if p >= 0:
            children[p].append(v)
    return tour_cost(inst, _preorder(children, 0))


def christofides(inst: MetricInstance) -> Tour:
    _require_graphic(inst)
    n = inst.n
    if n <= 2:
        return tour_cost(inst, range(n))
    parent = bfs_tree(inst.base)
    tree = [(p, v) for v, p in enumerate(parent) if p >= 0]
    deg = np.zeros(n, dtype=np.int64)
    for p, v in tree:
        deg[p] += 1
        deg[v] += 1
    odd = [int(v) for v in np.flatnonzero(deg % 2)]
    matching = min_weight_perfect_matching(odd, inst.dist)

    multi = nx.MultiGraph()
    multi.add_nodes_from(range(n))
    multi.add_edges_from(tree)
    multi.add_edges_from(matching)
    seen, order = set(), []
    for u, _ in nx.eulerian_circuit(multi, source=0):
        if u not in seen:
            seen.add(u)
            order.append(u)
    return tour_cost(inst, order)


@dataclass(frozen=True)
class BiconnectedDecomposition:
    components: list[list[Edge]]
    articulation_points: list[int]


def biconnected_components(g: SimpleGraph) -> BiconnectedDecomposition:
    """Edge-partition into biconnected components (DFS lowpoints, edge stack)."""
    n = g.node_count
    disc = [-1] * n
    low = [0] * n
    comps: list[list[Edge]] = []
    arts: set[int] = set()
    timer = 0
    for root in range(n):
        if disc[root] != -1 or not g.adjacency[root]:
            continue
        disc[root] = low[root] = timer
        timer += 1
        root_children = 0
        edge_stack: list[Edge] = []
        stack = [(root, -1, 0)]
        while stack:
            u, par, i = stack[-1]
            nbrs = g.adjacency[u]
            if i < len(nbrs):
                stack[-1] = (u, par, i + 1)
                w = nbrs[i]
                if w == par:
                    continue
                if disc[w] == -1:
                    edge_stack.append(_e(u, w))
                    disc[w] = low[w] = timer
                    timer += 1
                    if u == root:
                        root_children += 1
                    stack.append((w, u, 0))
                elif disc[w] < disc[u]:
                    edge_stack.append(_e(u, w))
                    low[u] = min(low[u], disc[w])
                continue
            stack.pop()
            if par == -1:
                continue
            low[par] = min(low[par], low[u])
            if low[u] >= disc[par]:
                if par != root:
                    arts.add(par)
                comp = []
                target = _e(par, u)
                while True:
                    e = edge_stack.pop()
                    comp.append(e)
                    if e == target:
                        break
                comps.append(sorted(comp))
        if root_children > 1:
            arts.add(root)
    comps.sort()
    return BiconnectedDecomposition(comps, sorted(arts))


class NotBiconnectedError(ValueError):
    pass


@dataclass(frozen=True)
class RemovablePairing:
    """Edge set ``removable`` plus disjoint pairs ``pairs[v] = (back, tree)``
    of edges at ``v``; dropping any subset of ``removable`` that takes at most
    one edge of every pair keeps the graph connected."""

    edges: frozenset
    removable: frozenset
    pairs: dict[int, tuple[Edge, Edge]]
    tree: frozenset
    root: int


def _dfs_tree(adj: dict[int, list[int]], root: int):
    parent = {root: -1}
    tin, tout = {}, {}
    clock = 0
    tin[root] = clock
    clock += 1
    stack = [(root, 0)]
    while stack:
        u, i = stack[-1]
        if i < len(adj[u]):
            stack[-1] = (u, i + 1)
            w = adj[u][i]
            if w not in parent:
                parent[w] = u
                tin[w] = clock
                clock += 1
                stack.append((w, 0))
            continue
        stack.pop()
        tout[u] = clock
        clock += 1
    return parent, tin, tout


def _pairing_on_edges(edges: Iterable[Edge], root: int) -> RemovablePairing:
    edges = frozenset(_e(u, v) for u, v in edges)
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    for a in adj.values():
        a.sort()
    parent, tin, tout = _dfs_tree(adj, root)
    tree = frozenset(_e(v, p) for v, p in parent.items() if p >= 0)
    removable = set(edges - tree)

    def child_towards(v: int, w: int) -> int:
        while parent[w] != v:
            w = parent[w]
        return w

    pairs: dict[int, tuple[Edge, Edge]] = {}
    for v in sorted(adj):
        if len(adj[v]) < 3:
            continue
        # back edges rooted at v run down to a proper descendant w
        below = [w for w in adj[v] if _e(v, w) not in tree
                 and tin[v] < tin[w] and tout[w] < tout[v]]
        for w in below:
            first = _e(v, child_towards(v, w))
            if first not in removable:
                removable.add(first)
                pairs[v] = (_e(v, w), first)
                break
    return RemovablePairing(edges, frozenset(removable), pairs, tree, root)


def removable_pairing(g: SimpleGraph, root: int = 0) -> RemovablePairing:
    """Removable pairing of a 2-vertex-connected graph from a DFS tree at ``root``.

    Starts from all non-tree edges; then, in increasing node id, every node of
    degree >= 3 that roots a back edge whose first tree edge is not yet
    removable adds that tree edge and pairs it with the back edge.
    """
    n = g.node_count
    if n < 2 or not g.is_connected():
        raise NotBiconnectedError("graph must be connected with at least two nodes")
    if n > 2:
        if int(g.degrees().min()) < 2:
            raise NotBiconnectedError("graph has a node of degree < 2")
        if biconnected_components(g).articulation_points:
            raise NotBiconnectedError("graph has an articulation point")
    return _pairing_on_edges(g.edges, root)


def core_subgraph(g: SimpleGraph) -> SimpleGraph:
    """Subgraph induced by nodes of degree >= 2 (labels kept, others isolated)."""
    deg = g.degrees()
    return SimpleGraph.from_edges(g.node_count, [(u, v) for u, v in g.edges
                                                  if deg[u] >= 2 and deg[v] >= 2])


def ms_pairings(g: SimpleGraph) -> list[RemovablePairing]:
    """One removable pairing per biconnected component of the degree >= 2 core,
    each rooted at the component's smallest node."""
    out = []
    for comp in biconnected_components(core_subgraph(g)).components:
        out.append(_pairing_on_edges(comp, min(min(e) for e in comp)))
    return out


def ms_cost_bound(g: SimpleGraph, pairings: list[RemovablePairing] | None = None) -> float:
    """Sum over core components of ``4/3 |E_i| - 2/3 |R_i|``.

    This is the value of the cost bound, not a constructed tour.
    """
    if pairings is None:
        pairings = ms_pairings(g)
    expected = {frozenset(c) for c in biconnected_components(core_subgraph(g)).components}
    got = [p.edges for p in pairings]
    if len(got) != len(expected) or set(got) != expected:
        raise ValueError("pairings do not match the biconnected components of the core")
    return sum(4 / 3 * len(p.edges) - 2 / 3 * len(p.removable) for p in pairings)


def ms_summary(g: SimpleGraph) -> dict:
    """Totals behind the bound: edges, removable edges, DFS tree edges, pairs."""
    ps = ms_pairings(g)
    return {
        "components": len(ps),
        "sum_E": sum(len(p.edges) for p in ps),
        "sum_R": sum(len(p.removable) for p in ps),
        "sum_S": sum(len(p.tree) for p in ps),
        "pairs": sum(len(p.pairs) for p in ps),
        "bound": ms_cost_bound(g, ps),
    }


def sample_removal(p: RemovablePairing, rng: np.random.Generator) -> set[Edge]:
    """Random ``F`` within ``p.removable`` taking at most one edge of each pair."""
    paired = {e for pair in p.pairs.values() for e in pair}
    f = {e for e in sorted(p.removable - paired) if rng.random() < 0.5}
    for v in sorted(p.pairs):
        pick = int(rng.integers(3))
        if pick < 2:
            f.add(p.pairs[v][pick])
    return f


def connected_after_removal(p: RemovablePairing, removed: set[Edge]) -> bool:
    kept = [e for e in p.edges if e not in removed]
    nodes = sorted({v for e in p.edges for v in e})
    index = {v: i for i, v in enumerate(nodes)}
    sub = SimpleGraph.from_edges(len(nodes), [(index[u], index[v]) for u, v in kept])
    return sub.is_connected()
