import math
from collections import Counter

import networkx as nx
import pytest

from plgtsp.bounds import evaluate_bound
from plgtsp.gadgets import (
    BETA_STAR, GadgetValidationError, MatchingProfile, NonPerfectMatchingError,
    PackingInfeasibleError, build_hybrid_instance, build_tsp_gadget_graph, certify_perfect_matching,
    default_definition, embed_simple, even_degree_packing, hardness_gap, matching_profile,
    min_packing_alpha, packing_capacity, validate_definition,
)


@pytest.fixture(scope="module")
def g1():
    return build_tsp_gadget_graph(1)


def test_hybrid_counts():
    h = build_hybrid_instance(1)
    assert (h.variables, len(h.eq2), len(h.eq3)) == (42, 60, 2)
    h = build_hybrid_instance(3)
    assert (h.variables, len(h.eq2), len(h.eq3)) == (126, 180, 6)
    assert set(h.occurrences().values()) == {3}
    with pytest.raises(ValueError):
        build_hybrid_instance(0)


@pytest.mark.parametrize("v", [1, 2, 3])
def test_gadget_counts(v):
    gg = build_tsp_gadget_graph(v)
    assert gg.graph.node_count == 708 * v
    assert gg.histogram() == {2: 156 * v, 3: 516 * v, 4: 36 * v}
    assert len(certify_perfect_matching(gg.graph)) == 354 * v
    assert matching_profile(gg, gg.matching).as_tuple() == (156 * v, 174 * v, 12 * v, 12 * v)


def test_certificate_agrees_with_networkx(g1):
    nxm = nx.max_weight_matching(g1.graph.to_networkx(), maxcardinality=True)
    assert len(nxm) == len(certify_perfect_matching(g1.graph)) == 354


def test_parity_gadgets_have_eight_nodes(g1):
    per = Counter(s for s, r in zip(g1.sources, g1.roles) if r.startswith("parity:"))
    assert set(per.values()) == {8}
    assert max(g1.histogram()) <= 4


def test_k4_sites(g1):
    g = g1.graph
    assert len(g1.k4_sites) == 12
    for site in g1.k4_sites:
        s = set(site)
        assert all(g.has_edge(a, b) for a in site for b in site if a < b)
        outside = [v for v in site if any(w not in s for w in g.adjacency[v])]
        assert len(outside) == 3
        assert all(sum(w not in s for w in g.adjacency[v]) == 1 for v in outside)


@pytest.mark.parametrize("mutate,constraint", [
    (lambda d: d.pop("clause"), "clause.present"),
    (lambda d: d["parity"]["nodes"].pop(), "parity.node_count"),
    (lambda d: d["parity"]["edges"].append(["t0", "t2"]), "parity.max_degree"),
    (lambda d: d["parity"]["matching"].__setitem__(0, ["t0", "b1"]), "parity.matching_edges"),
    (lambda d: d["clause"]["edges"].pop(), "clause.degree"),
    (lambda d: d["clause"]["k4_substitute"].pop(), "clause.k4_substitute"),
    (lambda d: d["clause"]["attach"].__setitem__("c1", 1), "clause.attach"),
    (lambda d: d["clause"]["nodes"].remove("s_mid"), "clause.extra_nodes"),
])
def test_tampered_definition(mutate, constraint):
    d = default_definition()
    mutate(d)
    with pytest.raises(GadgetValidationError) as err:
        validate_definition(d)
    assert err.value.constraint == constraint


def test_default_definition_valid():
    validate_definition(default_definition())


def test_profile_rejects_non_perfect(g1):
    with pytest.raises(NonPerfectMatchingError):
        matching_profile(g1, g1.matching[1:])
    a, b = g1.matching[0]
    c, d = g1.matching[1]
    with pytest.raises(NonPerfectMatchingError):
        matching_profile(g1, [(a, c), (b, d)] + g1.matching[2:])


def test_profile_scaling():
    gg = build_tsp_gadget_graph(5)
    p = matching_profile(gg, gg.matching)
    assert p.as_tuple() == (780, 870, 60, 60) and p.total == 1770


def test_embed_simple():
    e = embed_simple(1, 2)
    assert e.alpha == pytest.approx(math.log(4644), abs=1e-12) and e.regime == "3^beta"
    e = embed_simple(1, 10)
    assert e.alpha == pytest.approx(math.log(4 ** 10 * 36), abs=1e-12) and e.regime == "4^beta"
    t = embed_simple(1, BETA_STAR).binding_terms
    assert t["3^beta"] == pytest.approx(t["4^beta"], rel=1e-9)
    assert embed_simple(1, BETA_STAR - 1e-6).regime == "3^beta"
    assert embed_simple(1, BETA_STAR + 1e-6).regime == "4^beta"


def test_min_packing_alpha_bisection():
    a = min_packing_alpha(1.5, 354)
    assert packing_capacity(a, 1.5) == pytest.approx(354, abs=1e-6)
    assert packing_capacity(a * (1 - 1e-6), 1.5) < 354


@pytest.mark.parametrize("beta", [1.5, 2.5])
def test_packing_audit(g1, beta):
    prof = matching_profile(g1, g1.matching)
    plan = even_degree_packing(1, beta, prof, gadget=g1)
    assert len(plan.edges) == 354
    assert plan.audit() == {"parity": True, "capacity": True}
    assert min(plan.slot_counts()) >= 1
    for p in plan.edges:
        assert (p.mu - (p.du - 1)) % 2 == 0


def test_packing_empty_profile():
    plan = even_degree_packing(1, 2.0, MatchingProfile(0, 0, 0, 0))
    assert plan.edges == [] and plan.alpha_min == 0.0


def test_packing_infeasible_small_beta(g1):
    # the integral capacity estimate overshoots the floored slot sizes here
    with pytest.raises(PackingInfeasibleError):
        even_degree_packing(1, 1.1, matching_profile(g1, g1.matching))


def test_gap_limits_match_bounds():
    assert hardness_gap(1, 1.5, "packing").limit == pytest.approx(evaluate_bound("lb_packing", 1.5), abs=1e-9)
    assert hardness_gap(1, 1.1, "packing").limit == pytest.approx(1.0012, abs=2e-4)
    assert hardness_gap(1, 2.0, "simple").limit == pytest.approx(evaluate_bound("lb_simple", 2.0), abs=1e-9)
    with pytest.raises(ValueError):
        hardness_gap(1, 2.0, "other")


def test_gap_costs():
    h = hardness_gap(2, 2.0, "simple")
    assert h.no_cost - h.yes_cost == 2
    assert h.ratio == pytest.approx(h.no_cost / h.yes_cost)
    assert h.ratio > 1
