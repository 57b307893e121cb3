"""Matching primitives.

``max_cardinality_matching`` is Edmonds' blossom-shrinking search for general
graphs; ``bipartite_matching`` is plain augmenting paths.  The weighted case
(used by Christofides) is delegated to networkx's blossom implementation.
"""

from __future__ import annotations

from typing import Callable, Sequence

import networkx as nx


def max_cardinality_matching(adj: Sequence[Sequence[int]]) -> list[int]:
    """Maximum matching of the graph given by adjacency lists.

    Returns ``mate`` with ``mate[v] == -1`` for unmatched nodes.
    """
    n = len(adj)
    mate = [-1] * n
    for v in range(n):
        if mate[v] == -1:
            for w in adj[v]:
                if w != v and mate[w] == -1:
                    mate[v], mate[w] = w, v
                    break

    for root in range(n):
        if mate[root] != -1:
            continue
        end, parent = _augmenting_path(adj, mate, root)
        v = end
        while v != -1:
            pv = parent[v]
            nxt = mate[pv]
            mate[v], mate[pv] = pv, v
            v = nxt
    return mate


def _augmenting_path(adj, mate, root):
    n = len(adj)
    used = [False] * n
    parent = [-1] * n
    base = list(range(n))
    used[root] = True
    queue = [root]
    head = 0

    def lca(a, b):
        seen = [False] * n
        while True:
            a = base[a]
            seen[a] = True
            if mate[a] == -1:
                break
            a = parent[mate[a]]
        while True:
            b = base[b]
            if seen[b]:
                return b
            b = parent[mate[b]]

    def mark(v, b, child, blossom):
        while base[v] != b:
            blossom[base[v]] = blossom[base[mate[v]]] = True
            parent[v] = child
            child = mate[v]
            v = parent[mate[v]]

    while head < len(queue):
        v = queue[head]
        head += 1
        for to in adj[v]:
            if base[v] == base[to] or mate[v] == to:
                continue
            if to == root or (mate[to] != -1 and parent[mate[to]] != -1):
                b = lca(v, to)
                blossom = [False] * n
                mark(v, b, to, blossom)
                mark(to, b, v, blossom)
                for i in range(n):
                    if blossom[base[i]]:
                        base[i] = b
                        if not used[i]:
                            used[i] = True
                            queue.append(i)
            elif parent[to] == -1:
                parent[to] = v
                if mate[to] == -1:
                    return to, parent
                used[mate[to]] = True
                queue.append(mate[to])
    return -1, parent


def matching_pairs(mate: Sequence[int]) -> list[tuple[int, int]]:
    return [(v, w) for v, w in enumerate(mate) if w > v]


def bipartite_matching(left_adj: Sequence[Sequence[int]], right_count: int) -> list[int]:
    """Maximum bipartite matching by augmenting paths (Kuhn).

    ``left_adj[i]`` lists right-side neighbours of left node ``i``.  Returns
    ``match_left`` (right partner of each left node or -1).  Left nodes and
    their neighbour lists are scanned in the given order, so the result is
    deterministic.
    """
    match_right = [-1] * right_count
    match_left = [-1] * len(left_adj)
    for root in range(len(left_adj)):
        seen = [False] * right_count
        # iterative DFS over (left node, next neighbour index)
        stack = [(root, 0)]
        path: list[tuple[int, int]] = []
        found = False
        while stack and not found:
            u, k = stack[-1]
            if k >= len(left_adj[u]):
                stack.pop()
                if path:
                    path.pop()
                continue
            stack[-1] = (u, k + 1)
            r = left_adj[u][k]
            if seen[r]:
                continue
            seen[r] = True
            path.append((u, r))
            if match_right[r] == -1:
                found = True
            else:
                stack.append((match_right[r], 0))
        if found:
            for u, r in path:
                match_left[u] = r
                match_right[r] = u
    return match_left


def min_weight_perfect_matching(nodes: Sequence[int],
                                weight: Callable[[int, int], float]) -> list[tuple[int, int]]:
    """Exact minimum-weight perfect matching on the complete graph over ``nodes``."""
    if len(nodes) % 2:
        raise ValueError("perfect matching needs an even number of nodes")
    if not nodes:
        return []
    g = nx.Graph()
    g.add_nodes_from(nodes)
    for i, u in enumerate(nodes):
        for v in nodes[i + 1:]:
            g.add_edge(u, v, weight=weight(u, v))
    pairs = nx.min_weight_matching(g)
    out = sorted((min(u, v), max(u, v)) for u, v in pairs)
    if 2 * len(out) != len(nodes):
        raise RuntimeError("weighted matching did not cover every node")
    return out
