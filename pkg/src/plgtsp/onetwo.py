"""(1,2)-TSP: minimum cycle cover, cycle patching, and degree-1 contraction."""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import SimpleGraph
from .matching import bipartite_matching, max_cardinality_matching
from .metric import ONETWO, MetricInstance, Tour, build_instance, tour_cost


def _require_onetwo(inst: MetricInstance) -> None:
    if inst.kind != ONETWO:
        raise ValueError(f"(1,2) algorithm applied to a {inst.kind!r} instance")


@dataclass(frozen=True)
class CycleCover:
    cycles: list[list[int]]
    k: int
    pure: list[bool]

    @property
    def cost(self) -> int:
        return sum(len(c) for c in self.cycles) + self.k

    def to_dict(self) -> dict:
        return {"cycles": [list(c) for c in self.cycles], "k": self.k}


def _cycle_twos(g: SimpleGraph, cyc: list[int]) -> int:
    return sum(not g.has_edge(cyc[i - 1], cyc[i]) for i in range(len(cyc)))


def _make_cover(g: SimpleGraph, cycles: list[list[int]]) -> CycleCover:
    cycles = [_canonical(c) for c in cycles]
    cycles.sort(key=lambda c: c[0])
    twos = [_cycle_twos(g, c) for c in cycles]
    return CycleCover(cycles, sum(twos), [t == 0 for t in twos])


def _canonical(cyc: list[int]) -> list[int]:
    """Rotate to start at the smallest node, direction towards the smaller neighbour."""
    i = cyc.index(min(cyc))
    c = cyc[i:] + cyc[:i]
    if len(c) > 2 and c[-1] < c[1]:
        c = [c[0]] + c[:0:-1]
    return c


def cover_from_dict(data: dict, inst: MetricInstance) -> CycleCover:
    cover = _make_cover(inst.base, [list(map(int, c)) for c in data["cycles"]])
    if sorted(v for c in cover.cycles for v in c) != list(range(inst.n)):
        raise ValueError("cover cycles do not partition the node set")
    if any(len(c) < 3 for c in cover.cycles):
        raise ValueError("cover cycles must have length >= 3")
    if "k" in data and int(data["k"]) != cover.k:
        raise ValueError(f"cover states k={data['k']} but its cycles use {cover.k} 2-edges")
    return cover


def max_two_matching(g: SimpleGraph) -> list[tuple[int, int]]:
    """Maximum simple 2-matching (edge set with all degrees <= 2).

    Node splitting: every node gets two copies, every edge ``uv`` becomes a
    path ``u* - a - b - v*`` whose ends attach to both copies of their node.
    A maximum matching of that graph has size ``m + |X|`` for a maximum
    2-matching ``X``; edges whose middle link stays unmatched form ``X``.
    """
    n = g.node_count
    edges = g.sorted_edges()
    adj: list[list[int]] = [[] for _ in range(2 * n + 2 * len(edges))]
    for j, (u, v) in enumerate(edges):
        a, b = 2 * n + 2 * j, 2 * n + 2 * j + 1
        for end, w in ((a, u), (b, v)):
            for copy in (2 * w, 2 * w + 1):
                adj[end].append(copy)
                adj[copy].append(end)
        adj[a].append(b)
        adj[b].append(a)
    mate = max_cardinality_matching(adj)
    # an edge is used only when both of its ends are matched into node copies
    return [e for j, e in enumerate(edges)
            if mate[2 * n + 2 * j] not in (-1, 2 * n + 2 * j + 1)
            and mate[2 * n + 2 * j + 1] != -1]


def _components_of(n: int, edges: list[tuple[int, int]]):
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * n
    cycles, paths = [], []
    for s in range(n):
        if seen[s]:
            continue
        # walk from an endpoint if there is one, otherwise around the cycle
        comp, stack = [], [s]
        seen[s] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        ends = [u for u in comp if len(adj[u]) < 2]
        start = min(ends) if ends else min(comp)
        walk, prev, cur = [start], -1, start
        while True:
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt or nxt[0] == start:
                break
            prev, cur = cur, nxt[0]
            walk.append(cur)
        (paths if ends else cycles).append(walk)
    return cycles, paths


def _insert_path(g: SimpleGraph, cycles: list[list[int]], path: list[int]) -> None:
    """Splice a short path into the cycle position that costs least."""
    d = lambda p, q: 1 if g.has_edge(p, q) else 2
    best = None
    for ci, cyc in enumerate(cycles):
        for i in range(len(cyc)):
            a, b = cyc[i - 1], cyc[i]
            for seg in (path, path[::-1]):
                delta = d(a, seg[0]) + d(seg[-1], b) - d(a, b)
                if best is None or delta < best[0]:
                    best = (delta, ci, i, seg)
    _, ci, i, seg = best
    cycles[ci][i:i] = seg


def _merge_delta(g: SimpleGraph, c1: list[int], i: int, c2: list[int], j: int):
    """Cheapest way to merge two cycles through a chosen node of each."""
    d = lambda p, q: 1 if g.has_edge(p, q) else 2
    u, v = c1[i], c2[j]
    best = None
    for x_off in (-1, 1):
        x = c1[(i + x_off) % len(c1)]
        for y_off in (-1, 1):
            y = c2[(j + y_off) % len(c2)]
            delta = d(u, v) + d(x, y) - d(u, x) - d(v, y)
            if best is None or delta < best[0]:
                best = (delta, x_off, y_off)
    return best


def _splice(c1: list[int], i: int, x_off: int, c2: list[int], j: int, y_off: int) -> list[int]:
    """Drop edge (u, x) from c1 and (v, y) from c2, join u-v and x-y."""
    # path through c1 ending at u, starting at x
    if x_off == 1:
        p1 = c1[i + 1:] + c1[:i + 1]
    else:
        p1 = (c1[i:] + c1[:i])[::-1]
    # path through c2 starting at v, ending at y
    if y_off == -1:
        p2 = c2[j:] + c2[:j]
    else:
        p2 = (c2[j + 1:] + c2[:j + 1])[::-1]
    return p1 + p2


def _merge_triangles(g: SimpleGraph, cycles: list[list[int]]) -> list[list[int]]:
    """Merge triangles into neighbouring cycles along a base edge when that
    does not increase cost: triangle pairs first, then triangle into any cycle."""
    cycles = [list(c) for c in cycles]
    for partner_len in (3, None):
        changed = True
        while changed:
            changed = False
            for a in range(len(cycles)):
                if len(cycles[a]) != 3:
                    continue
                for b in range(len(cycles)):
                    if b == a or (partner_len and len(cycles[b]) != partner_len):
                        continue
                    hit = _best_bridge(g, cycles[a], cycles[b])
                    if hit is not None:
                        delta, i, x_off, j, y_off = hit
                        merged = _splice(cycles[a], i, x_off, cycles[b], j, y_off)
                        cycles = [c for t, c in enumerate(cycles) if t not in (a, b)] + [merged]
                        changed = True
                        break
                if changed:
                    break
    return cycles


def _best_bridge(g: SimpleGraph, c1: list[int], c2: list[int]):
    pos2 = {v: j for j, v in enumerate(c2)}
    best = None
    for i, u in enumerate(c1):
        for v in g.adjacency[u]:
            j = pos2.get(v)
            if j is None:
                continue
            delta, x_off, y_off = _merge_delta(g, c1, i, c2, j)
            if delta <= 0 and (best is None or delta < best[0]):
                best = (delta, i, x_off, j, y_off)
    return best


def min_cycle_cover(inst: MetricInstance) -> CycleCover:
    """Cheapest 2-factor of the (1,2) metric, up to the completion step.

    A maximum 2-matching of the base graph fixes the 1-edges; its paths are
    closed into one cycle with 2-edges (or spliced into existing cycles when
    fewer than three path nodes remain).  Triangles are then merged away
    where that is free.
    """
    _require_onetwo(inst)
    n = inst.n
    if n < 3:
        raise ValueError("a cycle cover needs at least 3 nodes")
    g = inst.base
    cycles, paths = _components_of(n, max_two_matching(g))
    loose = sum(len(p) for p in paths)
    if loose >= 3:
        paths.sort(key=lambda p: min(p))
        cycles.append([v for p in paths for v in p])
    else:
        for p in paths:
            _insert_path(g, cycles, p)
    return _make_cover(g, _merge_triangles(g, cycles))


@dataclass
class PatchState:
    bipartite: dict[int, list[int]]
    matching: dict[int, int]
    arcs: dict[int, int]
    paths: list[list[int]] = field(default_factory=list)
    stars: list[tuple[int, list[int]]] = field(default_factory=list)
    isolated: list[int] = field(default_factory=list)
    r2: int = 0
    n2: int = 0
    eq1_bound: float = 0.0

    def forest_arcs(self) -> list[tuple[int, int]]:
        out = []
        for p in self.paths:
            out += list(zip(p, p[1:]))
        for centre, leaves in self.stars:
            out += [(leaf, centre) for leaf in leaves]
        return out


def _extract_forest(r: int, arcs: dict[int, int]):
    used = [False] * r
    paths, stars = [], []
    for c in range(r):
        d = arcs.get(c)
        if used[c] or d is None or used[d]:
            continue
        e = arcs.get(d)
        if e is not None and e not in (c, d) and not used[e]:
            paths.append([c, d, e])
            used[c] = used[d] = used[e] = True
    for d in range(r):
        if used[d]:
            continue
        leaves = [c for c in range(r) if not used[c] and c != d and arcs.get(c) == d]
        if leaves:
            stars.append((d, leaves))
            used[d] = True
            for c in leaves:
                used[c] = True
    centre_of = {d: i for i, (d, _) in enumerate(stars)}
    for c in range(r):
        if not used[c] and arcs.get(c) in centre_of:
            stars[centre_of[arcs[c]]][1].append(c)
            used[c] = True
    return paths, stars, [c for c in range(r) if not used[c]]


def _patch_state(inst: MetricInstance, cover: CycleCover) -> PatchState:
    g = inst.base
    where = {v: ci for ci, cyc in enumerate(cover.cycles) for v in cyc}
    r = len(cover.cycles)
    bip: dict[int, list[int]] = {}
    for ci, cyc in enumerate(cover.cycles):
        outside = {w for u in cyc for w in g.adjacency[u] if where[w] != ci}
        bip[ci] = sorted(outside)
    match_left = bipartite_matching([bip[ci] for ci in range(r)], inst.n)
    matching = {ci: v for ci, v in enumerate(match_left) if v >= 0}
    arcs = {ci: where[v] for ci, v in matching.items()}
    paths, stars, isolated = _extract_forest(r, arcs)
    pure_iso = [c for c in isolated if cover.pure[c]]
    r2 = len(pure_iso)
    n2 = sum(len(cover.cycles[c]) for c in pure_iso)
    n = inst.n
    eq1 = n + cover.k + 2 / 9 * (n - n2 - cover.k) + r2
    return PatchState(bip, matching, arcs, paths, stars, isolated, r2, n2, eq1)


def _close_up(g: SimpleGraph, cycles: list[list[int]]) -> list[int]:
    """Open every cycle at its most expensive edge and chain the paths."""
    if len(cycles) == 1:
        return cycles[0]
    d = lambda p, q: 1 if g.has_edge(p, q) else 2
    paths = []
    for cyc in sorted(cycles, key=min):
        i = max(range(len(cyc)), key=lambda t: (d(cyc[t - 1], cyc[t]), -t))
        paths.append(cyc[i:] + cyc[:i])
    order = list(paths[0])
    for p in paths[1:]:
        if d(order[-1], p[-1]) < d(order[-1], p[0]):
            p = p[::-1]
        order += p
    return order


def py_pipeline(inst: MetricInstance, cover: CycleCover | None = None) -> tuple[PatchState, Tour]:
    """Patch a cycle cover into a tour.

    Cycles are matched to outside vertices they touch (bipartite matching),
    giving each cycle at most one out-arc; a spanning forest of 2-paths and
    in-stars is picked greedily and every forest arc is realised by splicing
    the two cycles at the matched vertex.  Remaining cycles are opened at
    their costliest edge and chained.
    """
    _require_onetwo(inst)
    g = inst.base
    if cover is None:
        cover = min_cycle_cover(inst)
    state = _patch_state(inst, cover)

    cycles = [list(c) for c in cover.cycles]
    owner = list(range(len(cycles)))

    def find(c):
        while owner[c] != c:
            owner[c] = owner[owner[c]]
            c = owner[c]
        return c

    for c, dst in state.forest_arcs():
        v = state.matching[c]
        a, b = find(c), find(dst)
        ca, cb = cycles[a], cycles[b]
        u = min(w for w in g.adjacency[v] if w in set(cover.cycles[c]))
        i, j = ca.index(u), cb.index(v)
        _, x_off, y_off = _merge_delta(g, ca, i, cb, j)
        cycles[b] = _splice(ca, i, x_off, cb, j, y_off)
        cycles[a] = []
        owner[a] = b

    order = _close_up(g, [c for c in cycles if c])
    return state, tour_cost(inst, order)


def cover_diagnostics(cover: CycleCover, state: PatchState) -> dict:
    return {"r2": state.r2, "n2": state.n2, "pureCycleCount": sum(cover.pure)}


def degree_one_pairs(g: SimpleGraph) -> list[tuple[int, int]]:
    """Edges joining two degree-1 nodes (automatically a matching)."""
    deg = g.degrees()
    return [(u, v) for u, v in g.sorted_edges() if deg[u] == 1 and deg[v] == 1]


def contract12_tour(inst: MetricInstance) -> Tour:
    """Contract every edge between two degree-1 nodes, solve the rest by
    :func:`py_pipeline`, then walk each contracted edge in place."""
    _require_onetwo(inst)
    n = inst.n
    g = inst.base
    if n < 3:
        return tour_cost(inst, range(n))
    pairs = degree_one_pairs(g)
    partner = {}
    for u, v in pairs:
        partner[u], partner[v] = v, u
    reps = [v for v in range(n) if v not in partner or partner[v] > v]
    index = {v: i for i, v in enumerate(reps)}
    # contracted pairs have no other edges, so they are isolated in the residual
    residual = SimpleGraph.from_edges(len(reps), [(index[u], index[v]) for u, v in g.edges
                                                  if u not in partner])
    if len(reps) < 3:
        small = list(range(len(reps)))
    else:
        _, t = py_pipeline(build_instance(residual, ONETWO))
        small = list(t.order)

    order: list[int] = []
    for i in small:
        a = reps[i]
        if a in partner:
            order += [a, partner[a]]
        else:
            order.append(a)
    return tour_cost(inst, order)
