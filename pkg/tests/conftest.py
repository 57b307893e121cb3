import itertools
import math

import pytest

from plgtsp.graph import SimpleGraph
from plgtsp.metric import build_instance
from plgtsp.model import PowerLawParams
from plgtsp.sampling import connected_components, sample_plg, simplify


def brute_force_tsp(inst) -> int:
    n = inst.n
    if n <= 3:
        return sum(inst.dist(i, (i + 1) % n) for i in range(n))
    best = math.inf
    for perm in itertools.permutations(range(1, n)):
        if perm[0] > perm[-1]:
            continue
        order = (0,) + perm
        c = sum(inst.dist(order[i], order[(i + 1) % n]) for i in range(n))
        best = min(best, c)
    return best


def brute_force_cover_k(g: SimpleGraph) -> int:
    """Fewest non-edges over all 2-factors of the complete graph on g's nodes."""
    n = g.node_count
    best = math.inf

    def rec(left, acc):
        nonlocal best
        if acc >= best:
            return
        if not left:
            best = acc
            return
        first = min(left)
        rest = left - {first}
        for size in range(2, len(rest) + 1):
            for others in itertools.combinations(sorted(rest), size):
                if len(rest) - size in (1, 2):
                    continue
                for perm in itertools.permutations(others):
                    if perm[0] > perm[-1]:
                        continue
                    cyc = (first,) + perm
                    k = sum(not g.has_edge(cyc[i - 1], cyc[i]) for i in range(len(cyc)))
                    rec(rest - set(others), acc + k)

    rec(frozenset(range(n)), 0)
    return best


def cycle(n):
    return SimpleGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n):
    return SimpleGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(leaves):
    return SimpleGraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete(n):
    return SimpleGraph.from_edges(n, itertools.combinations(range(n), 2))


def small_components(alpha, beta, max_n, want, min_n=3, seed0=0, max_seeds=5000, cyclic=None):
    """Connected components of sampled simple graphs with min_n <= n <= max_n,
    optionally only those with (``cyclic=True``) or without a cycle."""
    params = PowerLawParams(alpha, beta)
    out = []
    for seed in range(seed0, seed0 + max_seeds):
        g = simplify(sample_plg(params, seed))
        for comp in connected_components(g):
            if min_n <= len(comp) <= max_n:
                sub = g.induced_subgraph(comp)[0]
                if cyclic is not None and (sub.edge_count >= sub.node_count) != cyclic:
                    continue
                out.append(sub)
                if len(out) == want:
                    return out
    return out


@pytest.fixture
def brute_tsp():
    return brute_force_tsp


def instances(graphs, kind):
    return [build_instance(g, kind) for g in graphs]
