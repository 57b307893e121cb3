"""Gadget graphs for the (1,2)-TSP inapproximability reduction and their
embedding into a power-law degree sequence.

The builder wires ``60v`` equation parity gadgets and ``6v`` clause gadgets
(three per 3-equation, each with three parity gadgets of its own) into one
ring.  Two degree-3 extras of every clause gadget are replaced by a ``K4``,
which yields a graph on ``708v`` nodes with degrees ``{2: 156v, 3: 516v,
4: 36v}`` and a perfect matching.  The internal wiring comes from a gadget
definition (JSON) that is validated before use.
"""

from __future__ import annotations

import copy
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .graph import SimpleGraph
from .matching import matching_pairs, max_cardinality_matching
from .model import zeta

BETA_STAR = math.log(516 / 36) / math.log(4 / 3)

DEFAULT_DEFINITION = {
    "parity": {
        "nodes": ["t0", "t1", "t2", "t3", "b0", "b1", "b2", "b3"],
        "edges": [["t0", "t1"], ["t1", "t2"], ["t2", "t3"],
                  ["b0", "b1"], ["b1", "b2"], ["b2", "b3"],
                  ["t0", "b0"], ["t1", "b1"], ["t2", "b2"], ["t3", "b3"]],
        "ports": ["t0", "t3"],
        "matching": [["t0", "t1"], ["t2", "t3"], ["b0", "b1"], ["b2", "b3"]],
    },
    "clause": {
        "nodes": ["s_or", "s_mid", "e_or", "c1", "c2", "c3", "h1", "h2"],
        "edges": [["c1", "s_or"], ["c2", "s_mid"], ["c3", "e_or"],
                  ["s_or", "s_mid"], ["s_mid", "e_or"],
                  ["s_or", "h1"], ["e_or", "h2"], ["h1", "h2"]],
        "attach": {"c1": 0, "c2": 1, "c3": 2},
        "ports": ["h1", "h2"],
        "k4_substitute": ["c1", "c3"],
        "matching": [["s_or", "h1"], ["e_or", "h2"], ["s_mid", "c2"]],
    },
}

REQUIRED_CLAUSE_NODES = ("s_or", "s_mid", "e_or", "c1", "c2", "c3")


class GadgetValidationError(ValueError):
    def __init__(self, constraint: str, message: str):
        super().__init__(f"[{constraint}] {message}")
        self.constraint = constraint


def default_definition() -> dict:
    return copy.deepcopy(DEFAULT_DEFINITION)


def _check(cond: bool, constraint: str, message: str) -> None:
    if not cond:
        raise GadgetValidationError(constraint, message)


def _degrees(nodes, edges, extra: Counter) -> dict:
    deg = Counter(extra)
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    return {x: deg[x] for x in nodes}


def _check_matching(nodes, edges, matching, where: str) -> None:
    eset = {frozenset(e) for e in edges}
    covered = [x for e in matching for x in e]
    _check(all(frozenset(e) in eset for e in matching), f"{where}.matching_edges",
           "matching uses a pair that is not an edge")
    _check(sorted(covered) == sorted(nodes) and len(set(covered)) == len(covered),
           f"{where}.matching_perfect", "matching does not cover every node exactly once")


def validate_definition(defn: dict) -> None:
    """Check every structural constraint a gadget definition must satisfy."""
    for part in ("parity", "clause"):
        _check(part in defn, f"{part}.present", f"missing '{part}' template")
    par, cl = defn["parity"], defn["clause"]

    pn = list(par["nodes"])
    _check(len(pn) == 8 and len(set(pn)) == 8, "parity.node_count", "a parity gadget has exactly 8 nodes")
    _check(all(a in pn and b in pn and a != b for a, b in par["edges"]), "parity.edges",
           "parity edge with unknown node or loop")
    _check(len({frozenset(e) for e in par["edges"]}) == len(par["edges"]), "parity.edges",
           "duplicate parity edge")
    ports = list(par["ports"])
    _check(len(ports) == 2 and len(set(ports)) == 2 and all(p in pn for p in ports),
           "parity.ports", "parity gadget needs two distinct ports")
    pdeg = _degrees(pn, par["edges"], Counter(ports))
    _check(max(pdeg.values()) <= 3, "parity.max_degree", "parity node degree exceeds 3")
    _check(min(pdeg.values()) >= 2, "parity.min_degree", "parity node degree below 2")
    _check_matching(pn, par["edges"], par["matching"], "parity")
    types = Counter(tuple(sorted((pdeg[a], pdeg[b]))) for a, b in par["matching"])
    _check(types == Counter({(3, 3): 2, (2, 3): 2}), "parity.matching_profile",
           "parity matching must have two (3,3) and two (2,3) edges")

    cn = list(cl["nodes"])
    _check(len(set(cn)) == len(cn), "clause.nodes", "duplicate clause node")
    _check(all(x in cn for x in REQUIRED_CLAUSE_NODES), "clause.extra_nodes",
           f"clause gadget must contain {', '.join(REQUIRED_CLAUSE_NODES)}")
    _check(all(a in cn and b in cn and a != b for a, b in cl["edges"]), "clause.edges",
           "clause edge with unknown node or loop")
    _check(len({frozenset(e) for e in cl["edges"]}) == len(cl["edges"]), "clause.edges",
           "duplicate clause edge")
    attach = dict(cl["attach"])
    _check(sorted(attach.values()) == [0, 1, 2] and all(x in cn for x in attach),
           "clause.attach", "exactly three clause nodes attach to parity gadgets 0, 1, 2")
    cports = list(cl["ports"])
    _check(len(cports) == 2 and len(set(cports)) == 2 and all(p in cn for p in cports),
           "clause.ports", "clause gadget needs two distinct ports")
    extra = Counter(cports)
    for x in attach:
        extra[x] += 2
    cdeg = _degrees(cn, cl["edges"], extra)
    _check(all(d == 3 for d in cdeg.values()), "clause.degree",
           "every clause node must have degree 3 once attached")
    subs = list(cl["k4_substitute"])
    _check(len(subs) == 2 and len(set(subs)) == 2 and all(x in cn for x in subs),
           "clause.k4_substitute", "exactly two distinct clause nodes are replaced by K4")
    rest = [x for x in cn if x not in subs]
    _check(not any(x in subs for e in cl["matching"] for x in e), "clause.matching_edges",
           "substituted nodes are matched inside their K4")
    _check_matching(rest, cl["edges"], cl["matching"], "clause")


@dataclass(frozen=True)
class HybridInstance:
    """Mod-2 system with 2- and 3-variable equations, every variable used 3 times."""

    variables: int
    eq2: list[tuple[tuple[int, int], int]]
    eq3: list[tuple[tuple[int, int, int], int]]

    def occurrences(self) -> Counter:
        c = Counter()
        for vs, _ in self.eq2 + self.eq3:
            c.update(vs)
        return c


def build_hybrid_instance(v: int) -> HybridInstance:
    """Syntactically valid instance with 42v variables, 60v 2-equations and
    2v 3-equations (no amplifier structure)."""
    if v < 1:
        raise ValueError("v must be >= 1")
    nvar = 42 * v
    occ = [j % nvar for j in range(126 * v)]
    eq2 = [((occ[2 * i], occ[2 * i + 1]), i % 2) for i in range(60 * v)]
    base = 120 * v
    eq3 = [((occ[base + 3 * i], occ[base + 3 * i + 1], occ[base + 3 * i + 2]), 0) for i in range(2 * v)]
    return HybridInstance(nvar, eq2, eq3)


@dataclass(frozen=True)
class GadgetGraph:
    graph: SimpleGraph
    roles: list[str]
    sources: list[str]
    matching: list[tuple[int, int]]
    k4_sites: list[tuple[int, int, int, int]] = field(default_factory=list)

    def histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(int(d) for d in self.graph.degrees()).items()))


class _Builder:
    def __init__(self):
        self.roles: list[str] = []
        self.sources: list[str] = []
        self.edges: list[tuple[int, int]] = []
        self.matching: list[tuple[int, int]] = []
        self.k4: list[tuple[int, int, int, int]] = []

    def node(self, role: str, source: str) -> int:
        self.roles.append(role)
        self.sources.append(source)
        return len(self.roles) - 1

    def parity(self, defn: dict, source: str) -> tuple[int, int]:
        ids = {x: self.node(f"parity:{x}", source) for x in defn["nodes"]}
        self.edges += [(ids[a], ids[b]) for a, b in defn["edges"]]
        self.matching += [(ids[a], ids[b]) for a, b in defn["matching"]]
        p0, p1 = defn["ports"]
        return ids[p0], ids[p1]

    def clause(self, defn: dict, par: dict, source: str) -> tuple[int, int]:
        ports = [self.parity(par, f"{source}:p{j}") for j in range(3)]
        subs = set(defn["k4_substitute"])
        ids = {x: self.node(f"clause:{x}", source) for x in defn["nodes"] if x not in subs}
        nbrs: dict[str, list] = {x: [] for x in subs}
        for x, j in sorted(defn["attach"].items(), key=lambda t: t[1]):
            for p in ports[j]:
                if x in subs:
                    nbrs[x].append(p)
                else:
                    self.edges.append((ids[x], p))
        for a, b in defn["edges"]:
            if a in subs:
                nbrs[a].append(b)
            elif b in subs:
                nbrs[b].append(a)
            else:
                self.edges.append((ids[a], ids[b]))
        for x in defn["k4_substitute"]:
            k = [self.node(f"k4:{x}:{i}", source) for i in range(4)]
            self.edges += [(k[i], k[j]) for i in range(4) for j in range(i + 1, 4)]
            for ki, other in zip(k, nbrs[x]):
                self.edges.append((ki, other if isinstance(other, int) else ids[other]))
            self.matching += [(k[0], k[1]), (k[2], k[3])]
            self.k4.append(tuple(k))
        self.matching += [(ids[a], ids[b]) for a, b in defn["matching"]]
        p0, p1 = defn["ports"]
        return ids[p0], ids[p1]


def build_tsp_gadget_graph(v: int, definition: dict | None = None) -> GadgetGraph:
    if v < 1:
        raise ValueError("v must be >= 1")
    defn = default_definition() if definition is None else definition
    validate_definition(defn)
    hybrid = build_hybrid_instance(v)
    b = _Builder()
    units = [b.parity(defn["parity"], f"eq2:{i}") for i in range(len(hybrid.eq2))]
    for i in range(len(hybrid.eq3)):
        for c in range(3):
            units.append(b.clause(defn["clause"], defn["parity"], f"eq3:{i}:clause{c}"))
    for i, (_, out) in enumerate(units):
        b.edges.append((out, units[(i + 1) % len(units)][0]))

    g = SimpleGraph.from_edges(len(b.roles), b.edges)
    if g.edge_count != len(b.edges):
        raise GadgetValidationError("global.simple", "wiring produced parallel edges")
    gg = GadgetGraph(g, b.roles, b.sources, sorted((min(e), max(e)) for e in b.matching), b.k4)
    want = {2: 156 * v, 3: 516 * v, 4: 36 * v}
    if g.node_count != 708 * v or gg.histogram() != want:
        raise GadgetValidationError(
            "global.histogram", f"expected {708 * v} nodes with {want}, got {g.node_count} with {gg.histogram()}")
    return gg


def certify_perfect_matching(g: SimpleGraph) -> list[tuple[int, int]]:
    """Maximum matching of ``g``; its size is ``n/2`` iff a perfect matching exists."""
    return matching_pairs(max_cardinality_matching(g.adjacency))


class NonPerfectMatchingError(ValueError):
    pass


@dataclass(frozen=True)
class MatchingProfile:
    t23: int
    t33: int
    t34: int
    t44: int

    @property
    def total(self) -> int:
        return self.t23 + self.t33 + self.t34 + self.t44

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.t23, self.t33, self.t34, self.t44)

    def smaller_degrees(self) -> list[int]:
        """Smaller endpoint degree of every edge, in type order."""
        return [2] * self.t23 + [3] * (self.t33 + self.t34) + [4] * self.t44


def matching_profile(g: GadgetGraph | SimpleGraph, matching: Iterable[tuple[int, int]]) -> MatchingProfile:
    graph = g.graph if isinstance(g, GadgetGraph) else g
    matching = list(matching)
    covered = [x for e in matching for x in e]
    if len(set(covered)) != len(covered) or len(covered) != graph.node_count:
        raise NonPerfectMatchingError("matching is not perfect")
    if not all(graph.has_edge(a, b) for a, b in matching):
        raise NonPerfectMatchingError("matching contains a non-edge")
    deg = graph.degrees()
    types = Counter(tuple(sorted((int(deg[a]), int(deg[b])))) for a, b in matching)
    unknown = set(types) - {(2, 3), (3, 3), (3, 4), (4, 4)}
    if unknown:
        raise NonPerfectMatchingError(f"unexpected edge types {sorted(unknown)}")
    return MatchingProfile(types[(2, 3)], types[(3, 3)], types[(3, 4)], types[(4, 4)])


@dataclass(frozen=True)
class SimpleEmbedding:
    alpha: float
    regime: str
    binding_terms: dict[str, float]


def embed_simple(v: int, beta: float) -> SimpleEmbedding:
    """Smallest alpha with e^alpha >= max(2^b 156v, 3^b 516v, 4^b 36v)."""
    if v < 1 or not beta > 1:
        raise ValueError("need v >= 1 and beta > 1")
    terms = {"2^beta": 2 ** beta * 156 * v, "3^beta": 3 ** beta * 516 * v, "4^beta": 4 ** beta * 36 * v}
    regime = max(terms, key=terms.get)
    return SimpleEmbedding(math.log(terms[regime]), regime, terms)


def packing_capacity(alpha: float, beta: float) -> float:
    """Lower estimate of the number of edges the [2i, 2i+1] slots can hold."""
    e = math.exp(alpha)
    return e / (3 ** (beta - 1) * 2 * (beta - 1)) - 0.5 * e ** (1 / beta) + 0.5


def min_packing_alpha(beta: float, target: float) -> float:
    """Smallest alpha >= 0 with packing_capacity(alpha) >= target (bisection)."""
    if not beta > 1:
        raise ValueError("beta must be > 1")
    cap = lambda a: packing_capacity(a, beta)
    if cap(0.0) >= target:
        return 0.0
    d = 3 ** (beta - 1) * 2 * (beta - 1)
    # capacity falls until its derivative vanishes, then grows for good
    lo = max(0.0, math.log(d / (2 * beta)) / (1 - 1 / beta))
    hi = lo + 1.0
    while cap(hi) < target:
        hi *= 2
    while hi - lo > 1e-9 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if cap(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


class PackingInfeasibleError(RuntimeError):
    pass


@dataclass(frozen=True)
class PackedEdge:
    edge: tuple[int, int] | None
    du: int
    dv: int
    slot: int
    mu: int

    @property
    def inflated(self) -> tuple[int, int]:
        return (self.du + self.mu - 1, self.dv + self.mu - 1)


@dataclass(frozen=True)
class PackingPlan:
    beta: float
    alpha_min: float
    alpha: float
    attempts: int
    edges: list[PackedEdge]

    def slot_capacity(self, i: int) -> int:
        return math.floor(math.exp(self.alpha) / (2 * i + 1) ** self.beta + 1e-9)

    def slot_counts(self) -> dict[int, int]:
        return dict(sorted(Counter(p.slot for p in self.edges).items()))

    def audit(self) -> dict[str, bool]:
        parity = all(p.mu >= 1 and (p.mu - (p.du - 1)) % 2 == 0
                     and p.inflated[0] == 2 * p.slot and p.inflated[1] in (2 * p.slot, 2 * p.slot + 1)
                     for p in self.edges)
        delta = math.floor(math.exp(self.alpha / self.beta) + 1e-9)
        capacity = all(c <= self.slot_capacity(i) and 2 * i + 1 <= max(delta, 3)
                       for i, c in self.slot_counts().items())
        return {"parity": parity, "capacity": capacity}


def _greedy_fill(alpha: float, beta: float, items: list[tuple]) -> list[PackedEdge] | None:
    delta = math.floor(math.exp(alpha / beta) + 1e-9)
    top = max(1, (delta - 1) // 2)
    left = {i: math.floor(math.exp(alpha) / (2 * i + 1) ** beta + 1e-9) for i in range(1, top + 1)}
    out = []
    slot = 1
    for edge, du, dv in sorted(items, key=lambda t: (t[1], t[2])):
        slot = max(slot, math.ceil(du / 2))
        while slot <= top and left[slot] == 0:
            slot += 1
        if slot > top:
            return None
        left[slot] -= 1
        out.append(PackedEdge(edge, du, dv, slot, 2 * slot - du + 1))
    return out


def even_degree_packing(v: int, beta: float, profile: MatchingProfile,
                        gadget: GadgetGraph | None = None, retries: int = 10) -> PackingPlan:
    """Multiplicities putting every matching edge into a slot [2i, 2i+1].

    The smaller endpoint of an edge (degree d) is inflated to exactly 2i with
    multiplicity 2i - d + 1, the larger endpoint lands on 2i or 2i + 1.  Slots
    are filled greedily from i = 1 up; if the fill fails at the minimal alpha
    it is retried with alpha grown by 1%.
    """
    if profile.total != 354 * v and profile.total != 0:
        raise ValueError(f"profile has {profile.total} edges, expected {354 * v}")
    if gadget is not None:
        deg = gadget.graph.degrees()
        items = [((a, b), *sorted((int(deg[a]), int(deg[b])))) for a, b in gadget.matching]
    else:
        items = [(None, 2, 3)] * profile.t23 + [(None, 3, 3)] * profile.t33 \
            + [(None, 3, 4)] * profile.t34 + [(None, 4, 4)] * profile.t44
    alpha_min = min_packing_alpha(beta, profile.total)
    alpha = alpha_min
    for attempt in range(retries + 1):
        plan = _greedy_fill(alpha, beta, items) if items else []
        if plan is not None:
            return PackingPlan(beta, alpha_min, alpha, attempt, plan)
        alpha *= 1.01
    raise PackingInfeasibleError(f"greedy fill failed up to alpha={alpha / 1.01:.6f}")


@dataclass(frozen=True)
class HardnessGap:
    mode: str
    alpha: float
    gadget_nodes: int
    filler_nodes: float
    yes_cost: float
    no_cost: float
    ratio: float
    limit: float


def hardness_gap(v: int, beta: float, mode: str) -> HardnessGap:
    """YES/NO tour-cost thresholds for ``v`` gadget units and their ratio.

    With ``e = e^alpha`` and filler size ``|W| = (zeta - 1) e - 708 v`` a YES
    instance has a tour of cost ``708 v + |W| + 3e/2 + 3`` while every tour of
    a NO instance costs one more per unit.  ``limit`` is the ratio as
    ``v -> infinity``.
    """
    if mode == "simple":
        alpha = embed_simple(v, beta).alpha
        per_unit = max(2 ** beta * 156, 3 ** beta * 516, 4 ** beta * 36)
    elif mode == "packing":
        alpha = min_packing_alpha(beta, 354 * v)
        per_unit = 3 ** (beta - 1) * 2 * (beta - 1) * 354
    else:
        raise ValueError(f"unknown embedding mode {mode!r}")
    z = zeta(beta)
    e = math.exp(alpha)
    filler = (z - 1) * e - 708 * v
    yes = 708 * v + filler + 1.5 * e + 3
    no = yes + v
    x = per_unit * (z + 0.5)
    return HardnessGap(mode, alpha, 708 * v, filler, yes, no, no / yes, (x + 1) / x)
