"""Graph containers shared by the sampler, the solvers and the gadget builder.

Nodes are always ``0..n-1``.  The JSON form is::

    {"alpha": .., "beta": .., "nodes": n, "edges": [[u, v], ...],
     "loops": [[v, count], ...], "multiplicity": [[u, v, count], ...]}

with ``u < v`` and every list sorted lexicographically.  ``multiplicity`` only
lists pairs joined by more than one edge.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable

import networkx as nx
import numpy as np


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class SimpleGraph:
    node_count: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop ({u}, {v}) in a simple graph")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"edge ({u}, {v}) outside node range 0..{self.node_count - 1}")
            norm.add(_pair(u, v))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "SimpleGraph":
        return cls(n, frozenset(edges))

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    def has_edge(self, u: int, v: int) -> bool:
        return _pair(u, v) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def is_connected(self) -> bool:
        if self.node_count == 0:
            return True
        return len(bfs_order(self, 0)) == self.node_count

    def induced_subgraph(self, nodes: Iterable[int]) -> tuple["SimpleGraph", list[int]]:
        """Induced subgraph relabelled to ``0..k-1``; returns it with ``new -> old``."""
        old = sorted(set(nodes))
        index = {v: i for i, v in enumerate(old)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return SimpleGraph.from_edges(len(old), edges), old

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.node_count))
        g.add_edges_from(self.sorted_edges())
        return g


@dataclass(frozen=True)
class MultiGraph:
    """Random-matching output: multi-edges and self-loops are kept."""

    node_count: int
    assigned_degrees: tuple[int, ...]
    multiplicity: dict[tuple[int, int], int]
    self_loops: dict[int, int]
    alpha: float | None = None
    beta: float | None = None

    def realized_degrees(self) -> np.ndarray:
        deg = np.zeros(self.node_count, dtype=np.int64)
        for (u, v), c in self.multiplicity.items():
            deg[u] += c
            deg[v] += c
        for v, c in self.self_loops.items():
            deg[v] += 2 * c
        return deg

    @property
    def matched_copies(self) -> int:
        return 2 * sum(self.multiplicity.values()) + 2 * sum(self.self_loops.values())

    @cached_property
    def neighbor_sets(self) -> tuple[tuple[int, ...], ...]:
        """Distinct neighbours (self excluded) of every node."""
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in self.multiplicity:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)


def bfs_order(g: SimpleGraph, source: int) -> list[int]:
    seen = [False] * g.node_count
    seen[source] = True
    order = [source]
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if not seen[w]:
                seen[w] = True
                order.append(w)
                queue.append(w)
    return order


def graph_to_dict(g: SimpleGraph | MultiGraph, alpha: float | None = None,
                  beta: float | None = None) -> dict:
    if isinstance(g, MultiGraph):
        pairs = sorted(g.multiplicity)
        return {
            "alpha": g.alpha,
            "beta": g.beta,
            "nodes": g.node_count,
            "edges": [[u, v] for u, v in pairs],
            "loops": [[v, c] for v, c in sorted(g.self_loops.items())],
            "multiplicity": [[u, v, g.multiplicity[(u, v)]] for u, v in pairs
                             if g.multiplicity[(u, v)] > 1],
            "degrees": list(g.assigned_degrees),
        }
    return {
        "alpha": alpha,
        "beta": beta,
        "nodes": g.node_count,
        "edges": [[u, v] for u, v in g.sorted_edges()],
        "loops": [],
        "multiplicity": [],
    }


def graph_from_dict(data: dict) -> SimpleGraph | MultiGraph:
    """Inverse of :func:`graph_to_dict`; a document with loops, multi-edges
    or assigned degrees comes back as a :class:`MultiGraph`."""
    n = int(data["nodes"])
    edges = [tuple(e) for e in data.get("edges", [])]
    loops = data.get("loops", [])
    mult = data.get("multiplicity", [])
    if not loops and not mult and "degrees" not in data:
        return SimpleGraph.from_edges(n, edges)
    multiplicity = {_pair(u, v): 1 for u, v in edges}
    for u, v, c in mult:
        multiplicity[_pair(u, v)] = int(c)
    self_loops = {int(v): int(c) for v, c in loops}
    degrees = data.get("degrees")
    g = MultiGraph(n, (), multiplicity, self_loops, data.get("alpha"), data.get("beta"))
    if degrees is None:
        degrees = [int(d) for d in g.realized_degrees()]
    return MultiGraph(n, tuple(int(d) for d in degrees), multiplicity, self_loops,
                      data.get("alpha"), data.get("beta"))


def dumps(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


def write_json(path: str | Path, obj: dict) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
