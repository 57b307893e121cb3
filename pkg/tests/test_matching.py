import itertools
import random

import networkx as nx
import pytest

from plgtsp.matching import (
    bipartite_matching, matching_pairs, max_cardinality_matching, min_weight_perfect_matching,
)


def random_graph(rng, n, p):
    adj = [[] for _ in range(n)]
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < p:
            adj[u].append(v)
            adj[v].append(u)
    return adj


@pytest.mark.parametrize("seed", range(40))
def test_cardinality_matches_networkx(seed):
    rng = random.Random(seed)
    adj = random_graph(rng, rng.randint(2, 30), rng.choice([0.08, 0.15, 0.3]))
    mate = max_cardinality_matching(adj)
    pairs = matching_pairs(mate)
    for u, v in pairs:
        assert v in adj[u] and mate[u] == v and mate[v] == u
    g = nx.Graph()
    g.add_nodes_from(range(len(adj)))
    g.add_edges_from((u, v) for u in range(len(adj)) for v in adj[u])
    assert len(pairs) == len(nx.max_weight_matching(g, maxcardinality=True))


def test_odd_cycle_blossom():
    # 5-cycle plus a pendant: perfect matching needs the blossom
    adj = [[1, 4], [0, 2], [1, 3], [2, 4], [3, 0, 5], [4]]
    assert len(matching_pairs(max_cardinality_matching(adj))) == 3


@pytest.mark.parametrize("seed", range(20))
def test_bipartite_matches_networkx(seed):
    rng = random.Random(seed)
    left, right = rng.randint(1, 12), rng.randint(1, 12)
    ladj = [sorted(rng.sample(range(right), rng.randint(0, right))) for _ in range(left)]
    ml = bipartite_matching(ladj, right)
    used = [r for r in ml if r >= 0]
    assert len(used) == len(set(used))
    assert all(r in ladj[i] for i, r in enumerate(ml) if r >= 0)
    g = nx.Graph()
    tops = [("L", i) for i in range(left)]
    g.add_nodes_from(tops)
    g.add_nodes_from(("R", r) for r in range(right))
    g.add_edges_from((("L", i), ("R", r)) for i in range(left) for r in ladj[i])
    assert len(used) == len(nx.bipartite.maximum_matching(g, top_nodes=tops)) // 2


def test_min_weight_perfect_matching_brute_force():
    rng = random.Random(1)
    for _ in range(20):
        nodes = list(range(6))
        w = {(u, v): rng.randint(1, 9) for u, v in itertools.combinations(nodes, 2)}
        f = lambda u, v: w[(min(u, v), max(u, v))]
        got = sum(f(u, v) for u, v in min_weight_perfect_matching(nodes, f))

        def best(rest):
            if not rest:
                return 0
            a = rest[0]
            return min(f(a, b) + best([x for x in rest[1:] if x != b]) for b in rest[1:])

        assert got == best(nodes)


def test_min_weight_perfect_matching_errors():
    assert min_weight_perfect_matching([], lambda u, v: 1) == []
    with pytest.raises(ValueError):
        min_weight_perfect_matching([1, 2, 3], lambda u, v: 1)
