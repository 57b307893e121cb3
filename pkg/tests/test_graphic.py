import math

import networkx as nx
import numpy as np
import pytest

from plgtsp.graph import SimpleGraph
from plgtsp.graphic import (
    NotBiconnectedError, biconnected_components, christofides, connected_after_removal,
    core_subgraph, ms_cost_bound, ms_pairings, ms_summary, mst_double_tour, removable_pairing,
    sample_removal,
)
from plgtsp.metric import GRAPHIC, ONETWO, build_instance, exact_optimum, validate_tour
from plgtsp.model import PowerLawParams, zeta
from plgtsp.sampling import largest_component, sample_plg, simplify

from conftest import complete, cycle, path, small_components, star


def wheel(spokes):
    rim = [(1 + i, 1 + (i + 1) % spokes) for i in range(spokes)]
    return SimpleGraph.from_edges(spokes + 1, rim + [(0, i) for i in range(1, spokes + 1)])


@pytest.mark.parametrize("g,opt", [(cycle(4), 4), (star(3), 6), (path(5), 8)])
def test_small_tours(g, opt):
    inst = build_instance(g, GRAPHIC)
    assert exact_optimum(inst).cost == opt
    m = mst_double_tour(inst)
    c = christofides(inst)
    validate_tour(inst, m)
    validate_tour(inst, c)
    assert opt <= m.cost <= 2 * (g.node_count - 1)
    assert opt <= c.cost <= 1.5 * opt


def test_christofides_examples_exact():
    assert christofides(build_instance(cycle(4), GRAPHIC)).cost == 4
    assert christofides(build_instance(star(3), GRAPHIC)).cost == 6


def test_graphic_solvers_reject_onetwo():
    inst = build_instance(cycle(4), ONETWO)
    with pytest.raises(ValueError):
        mst_double_tour(inst)
    with pytest.raises(ValueError):
        christofides(inst)


def test_sampled_ratios():
    comps = small_components(math.log(40), 2.1, 14, 100, min_n=4)
    assert len(comps) == 100
    for g in comps:
        inst = build_instance(g, GRAPHIC)
        opt = exact_optimum(inst).cost
        assert christofides(inst).cost <= 1.5 * opt
        assert mst_double_tour(inst).cost <= 2 * opt


def test_biconnected_examples():
    bowtie = SimpleGraph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    d = biconnected_components(bowtie)
    assert len(d.components) == 2 and d.articulation_points == [2]
    d = biconnected_components(cycle(6))
    assert len(d.components) == 1 and d.articulation_points == []
    tree = SimpleGraph.from_edges(6, [(0, 1), (0, 2), (2, 3), (2, 4), (4, 5)])
    d = biconnected_components(tree)
    assert sorted(d.components) == sorted([[e] for e in tree.sorted_edges()])


def test_biconnected_matches_networkx():
    for seed in range(15):
        g = simplify(sample_plg(PowerLawParams(math.log(150), 2.0), seed))
        d = biconnected_components(g)
        nxg = g.to_networkx()
        want = sorted(sorted(tuple(sorted(e)) for e in c) for c in nx.biconnected_component_edges(nxg))
        assert sorted(d.components) == want
        assert d.articulation_points == sorted(nx.articulation_points(nxg))


def test_pairing_cycle():
    p = removable_pairing(cycle(4))
    assert len(p.removable) == 1 and p.removable == p.edges - p.tree
    assert p.pairs == {}
    assert ms_cost_bound(cycle(4)) == pytest.approx(14 / 3)


def test_pairing_k4():
    p = removable_pairing(complete(4))
    assert len(p.removable) >= len(p.edges - p.tree) == 3
    assert len(p.pairs) >= 1
    expected = 4 / 3 * 6 - 2 / 3 * len(p.removable)
    assert ms_cost_bound(complete(4), [p]) == pytest.approx(expected)
    assert ms_cost_bound(complete(4), [p]) <= 8


def check_pairing(p, rng, draws):
    assert len(p.removable) >= len(p.edges - p.tree)
    assert p.edges - p.tree <= p.removable
    seen = set()
    for v, (a, b) in p.pairs.items():
        assert v in a and v in b
        assert {a, b} <= p.removable
        assert not ({a, b} & seen)
        seen |= {a, b}
        assert sum(v in e for e in p.edges) >= 3
    for _ in range(draws):
        assert connected_after_removal(p, sample_removal(p, rng))


def test_pairing_wheel_sampled():
    rng = np.random.default_rng(0)
    check_pairing(removable_pairing(wheel(5)), rng, 1000)


def test_pairing_rejects_non_biconnected():
    with pytest.raises(NotBiconnectedError):
        removable_pairing(path(4))
    bowtie = SimpleGraph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    with pytest.raises(NotBiconnectedError):
        removable_pairing(bowtie)


def test_sampled_core_pairings():
    rng = np.random.default_rng(1)
    g = simplify(sample_plg(PowerLawParams(math.log(600), 2.2), 2))
    ps = ms_pairings(g)
    assert ps
    for p in ps:
        check_pairing(p, rng, 50)
    total_e = sum(len(p.edges) for p in ps)
    assert ms_cost_bound(g, ps) <= 4 / 3 * total_e


def test_ms_cost_bound_rejects_mismatch():
    g = complete(4)
    with pytest.raises(ValueError):
        ms_cost_bound(g, [])


def test_ms_summary_consistent():
    g = simplify(sample_plg(PowerLawParams(math.log(300), 2.3), 4))
    s = ms_summary(g)
    assert s["bound"] == pytest.approx(4 / 3 * s["sum_E"] - 2 / 3 * s["sum_R"])
    assert s["sum_E"] == core_subgraph(g).edge_count


def test_ms_bound_vs_asymptotic():
    p = PowerLawParams(math.log(2000), 2.3)
    g = simplify(sample_plg(p, 0))
    target = (2 / 3 * zeta(p.beta - 1) + 2 / 3 * zeta(p.beta) + 5 / 6) * math.exp(p.alpha)
    assert ms_cost_bound(g) <= 1.1 * target
