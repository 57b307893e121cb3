"""The P(alpha, beta) random multigraph model and Monte-Carlo neighbour statistics.

Sampling follows the copies-and-matching recipe: every node ``v`` gets
``deg(v)`` copies, the copies are matched uniformly at random, and each matched
pair of copies becomes one edge (a self-loop when both copies belong to the
same node).  An odd number of copies leaves one uniformly chosen copy
unmatched.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import MultiGraph, SimpleGraph, bfs_order
from .model import PowerLawParams, degree_sequence


def trial_rng(seed_base: int, trial: int = 0) -> np.random.Generator:
    """Independent PCG64 stream for trial ``trial`` of an experiment."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed_base, trial])))


def sample_plg(params: PowerLawParams, seed: int | np.random.Generator,
               cap: int | None = None) -> MultiGraph:
    rng = seed if isinstance(seed, np.random.Generator) else trial_rng(seed)
    deg = degree_sequence(params, cap).degrees()
    n = len(deg)
    copies = rng.permutation(np.repeat(np.arange(n, dtype=np.int64), deg))
    if len(copies) % 2:
        copies = copies[:-1]
    a, b = copies[0::2], copies[1::2]
    lo, hi = np.minimum(a, b), np.maximum(a, b)

    loops = lo == hi
    loop_nodes, loop_counts = np.unique(lo[loops], return_counts=True)
    keys, counts = np.unique(lo[~loops] * n + hi[~loops], return_counts=True)
    multiplicity = {(int(k // n), int(k % n)): int(c) for k, c in zip(keys, counts)}
    self_loops = {int(v): int(c) for v, c in zip(loop_nodes, loop_counts)}
    return MultiGraph(n, tuple(int(d) for d in deg), multiplicity, self_loops,
                      params.alpha, params.beta)


def simplify(g: MultiGraph) -> SimpleGraph:
    return SimpleGraph.from_edges(g.node_count, g.multiplicity.keys())


def connected_components(g: SimpleGraph) -> list[list[int]]:
    """Components as sorted node lists, largest first, ties by smallest label."""
    seen = [False] * g.node_count
    comps = []
    for s in range(g.node_count):
        if seen[s]:
            continue
        comp = bfs_order(g, s)
        for v in comp:
            seen[v] = True
        comps.append(sorted(comp))
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def largest_component(g: SimpleGraph) -> tuple[SimpleGraph, list[int]]:
    """Induced subgraph on the largest component and its ``new -> old`` map."""
    if g.node_count == 0:
        return g, []
    return g.induced_subgraph(connected_components(g)[0])


@dataclass(frozen=True)
class NeighborStats:
    n1_per_node: np.ndarray
    n2_per_node: np.ndarray
    m1: int
    degrees: np.ndarray


def _distinct_pairs(g: SimpleGraph | MultiGraph) -> tuple[np.ndarray, np.ndarray]:
    pairs = g.multiplicity.keys() if isinstance(g, MultiGraph) else g.edges
    if not pairs:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    arr = np.array(sorted(pairs), dtype=np.int64)
    return arr[:, 0], arr[:, 1]


def neighbor_stats(g: SimpleGraph | MultiGraph) -> NeighborStats:
    """Counts of degree-1 and degree-2 neighbours and the m1 statistic.

    A :class:`SimpleGraph` is judged by its own degrees.  A :class:`MultiGraph`
    is judged by its *assigned* degrees with distinct neighbours, which is the
    reading the analytic expectations use.
    """
    if isinstance(g, MultiGraph):
        deg = np.asarray(g.assigned_degrees, dtype=np.int64)
    else:
        deg = g.degrees()
    n = g.node_count
    u, v = _distinct_pairs(g)
    n1 = (np.bincount(u, weights=deg[v] == 1, minlength=n)
          + np.bincount(v, weights=deg[u] == 1, minlength=n)).astype(np.int64)
    n2 = (np.bincount(u, weights=deg[v] == 2, minlength=n)
          + np.bincount(v, weights=deg[u] == 2, minlength=n)).astype(np.int64)
    ones = (deg[u] == 1) & (deg[v] == 1)
    return NeighborStats(n1, n2, int(2 * np.count_nonzero(ones)), deg)


def a_values(stats: NeighborStats) -> tuple[float, float]:
    """Tour-independent extra 2-edge mass from degree-1 and degree-2 neighbours:
    sums of ``max(0, N_i(v)/2 - 1)`` over nodes of degree > 2."""
    big = stats.degrees > 2
    a1 = float(np.maximum(0.0, stats.n1_per_node[big] / 2 - 1).sum())
    a2 = float(np.maximum(0.0, stats.n2_per_node[big] / 2 - 1).sum())
    return a1, a2


def trial_statistics(params: PowerLawParams, seed_base: int, trial: int) -> dict:
    g = sample_plg(params, trial_rng(seed_base, trial))
    st = neighbor_stats(g)
    a1, a2 = a_values(st)
    big = st.degrees > 2
    return {
        "trial": trial,
        "m1": st.m1,
        "A1": a1,
        "A2": a2,
        "N1_mean": float(st.n1_per_node[big].mean()) if big.any() else 0.0,
        "N2_mean": float(st.n2_per_node[big].mean()) if big.any() else 0.0,
    }


def _trial_job(args):
    return trial_statistics(*args)


def run_trials(params: PowerLawParams, trials: int, seed_base: int, jobs: int = 1) -> list[dict]:
    """Per-trial statistics in trial order, whatever ``jobs`` is."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    work = [(params, seed_base, t) for t in range(trials)]
    if jobs <= 1:
        return [trial_statistics(*w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_trial_job, work))


def mean_stderr(values: list[float]) -> tuple[float, float | None]:
    """Mean and standard error, summed in the given order with ``math.fsum``."""
    k = len(values)
    mean = math.fsum(values) / k
    if k < 2:
        return mean, None
    var = math.fsum((x - mean) ** 2 for x in values) / (k - 1)
    return mean, math.sqrt(var / k)


@dataclass(frozen=True)
class AEstimate:
    a1_mean: float
    a1_stderr: float | None
    a2_mean: float
    a2_stderr: float | None


def estimate_A_values(params: PowerLawParams, trials: int, seed_base: int,
                      jobs: int = 1) -> AEstimate:
    rows = run_trials(params, trials, seed_base, jobs)
    a1 = mean_stderr([r["A1"] for r in rows])
    a2 = mean_stderr([r["A2"] for r in rows])
    return AEstimate(a1[0], a1[1], a2[0], a2[1])
