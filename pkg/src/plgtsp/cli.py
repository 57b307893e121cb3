"""Command-line entry point: ``plgtsp {gen,solve,verify,curves,stats,gadget,bounds}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bounds as B
from .gadgets import (GadgetValidationError, PackingInfeasibleError, build_tsp_gadget_graph,
                      certify_perfect_matching, embed_simple, even_degree_packing, hardness_gap,
                      matching_profile)
from .graph import MultiGraph, dumps, graph_from_dict, graph_to_dict, read_json
from .graphic import christofides, ms_summary, mst_double_tour
from .metric import (GRAPHIC, KINDS, ONETWO, ORACLE_CAP, DisconnectedGraphError, OracleSizeError,
                     Tour, build_instance, exact_optimum, instance_lower_bound, tour_cost)
from .model import NodeCapError, PowerLawParams, node_cap
from .onetwo import contract12_tour, cover_diagnostics, min_cycle_cover, py_pipeline
from .sampling import (largest_component, mean_stderr, run_trials, sample_plg, simplify,
                       trial_rng)

ALGORITHMS = {
    "mst": GRAPHIC,
    "christofides": GRAPHIC,
    "ms-bound": GRAPHIC,
    "py12": ONETWO,
    "contract12": ONETWO,
    "exact": None,
}


class CliError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args: argparse.Namespace) -> dict:
    # output locations are not part of the experiment, so reruns stay byte-identical
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "certificate")}


def cmd_gen(args) -> int:
    if args.beta <= 1 and not args.allow_any_beta:
        raise CliError(f"beta={args.beta} is outside the supported range beta > 1 "
                       "(pass --allow-any-beta to sample anyway)")
    params = PowerLawParams(args.alpha, args.beta)
    g = sample_plg(params, trial_rng(args.seed), cap=node_cap())
    if args.simplify or args.giant:
        g = simplify(g)
    mapping = None
    if args.giant:
        g, mapping = largest_component(g)
    doc = graph_to_dict(g, args.alpha, args.beta)
    if args.kind:
        doc["kind"] = args.kind
    if mapping is not None:
        doc["original_ids"] = mapping
    doc["config"] = _config(args)
    _emit(dumps(doc), args.out)
    return 0


def _load_instance(path: str, kind: str | None):
    data = read_json(path)
    kind = kind or data.get("kind")
    if kind not in KINDS:
        raise CliError(f"instance kind must be one of {KINDS} (use --kind)")
    g = graph_from_dict(data)
    if isinstance(g, MultiGraph):
        g = simplify(g)
    try:
        return build_instance(g, kind)
    except DisconnectedGraphError as e:
        raise CliError(f"{e}; sample with 'gen --giant' for graphic instances") from e


def _solve(inst, alg: str, oracle_cap: int) -> dict:
    need = ALGORITHMS[alg]
    if need is not None and need != inst.kind:
        raise CliError(f"algorithm {alg!r} needs a {need} instance, got {inst.kind}")
    out: dict = {"algorithm": alg, "kind": inst.kind, "n": inst.n, "bound_only": False}
    cover = None
    if inst.kind == ONETWO and inst.n >= 3:
        cover = min_cycle_cover(inst)
    lb = instance_lower_bound(inst, cover)

    tour: Tour | None = None
    if alg == "mst":
        tour = mst_double_tour(inst)
    elif alg == "christofides":
        tour = christofides(inst)
    elif alg == "ms-bound":
        summary = ms_summary(inst.base)
        out.update(bound_only=True, note="bound, not tour", cost=summary["bound"],
                   sum_E=summary["sum_E"], sum_R=summary["sum_R"], sum_S=summary["sum_S"],
                   components=summary["components"], pairs=summary["pairs"])
    elif alg == "py12":
        if inst.n < 3:
            tour = tour_cost(inst, range(inst.n))
        else:
            state, tour = py_pipeline(inst, cover)
            out.update(cover_diagnostics(cover, state))
            out.update(k=cover.k, eq1_bound=state.eq1_bound)
    elif alg == "contract12":
        tour = contract12_tour(inst)
    elif alg == "exact":
        tour = exact_optimum(inst, oracle_cap)

    if tour is not None:
        out["cost"] = tour.cost
        out["tour"] = list(tour.order)
    out["lower_bound"] = lb.value
    out["ratio_vs_lower_bound"] = out["cost"] / lb.value if lb.value else None
    return out


def cmd_solve(args) -> int:
    inst = _load_instance(args.instance, args.kind)
    try:
        result = _solve(inst, args.alg, args.oracle_cap)
    except OracleSizeError as e:
        raise CliError(str(e)) from e
    result["config"] = _config(args)
    _emit(json.dumps(result, indent=1) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    inst = _load_instance(args.instance, args.kind)
    result = read_json(args.result)
    report = {"algorithm": result.get("algorithm"), "n": inst.n}
    if result.get("bound_only"):
        recomputed = ms_summary(inst.base)["bound"]
        report.update(valid=math.isclose(recomputed, result["cost"], rel_tol=1e-12),
                      cost=recomputed, bound_only=True)
    else:
        try:
            t = tour_cost(inst, result["tour"])
            report.update(valid=t.cost == result["cost"], cost=t.cost)
        except (ValueError, KeyError) as e:
            report.update(valid=False, error=str(e))
    sys.stdout.write(json.dumps(report) + "\n")
    return 0 if report["valid"] else 1


def cmd_curves(args) -> int:
    if args.figure:
        text = B.figure_csv(args.figure)
    else:
        if args.bound is None or args.lo is None:
            raise CliError("give --figure or --bound with --lo")
        hi = args.lo if args.hi is None else args.hi
        curves = [B.emit_curve(b, args.lo, hi, args.step) for b in args.bound]
        text = B.curves_csv(curves)
    _emit(text, args.out)
    return 0


def cmd_stats(args) -> int:
    params = PowerLawParams(args.alpha, args.beta)
    rows = run_trials(params, args.trials, args.seed, args.jobs)
    doc: dict = {"config": _config(args), "scale": params.scale}
    for key in ("m1", "A1", "A2", "N1_mean", "N2_mean"):
        mean, se = mean_stderr([float(r[key]) for r in rows])
        doc[key] = {"mean": mean, "stderr": se}
    ref: dict = {"m1_floor": (2 - B.zeta(args.beta - 1)) * params.scale if args.beta > 2 else None}
    if args.beta > 2:
        ref["A1_closed_form"] = B.deg1_neighbor_term(args.beta) * params.scale
        ref["A2_closed_form"] = B.deg2_neighbor_term(args.beta) * params.scale
    doc["closed_forms"] = ref
    if args.per_trial:
        doc["trials"] = rows
    _emit(json.dumps(doc, indent=1) + "\n", args.out)
    return 0


def cmd_gadget(args) -> int:
    definition = None
    if args.definition:
        definition = json.loads(Path(args.definition).read_text())
    gg = build_tsp_gadget_graph(args.v, definition)
    n = gg.graph.node_count
    matched = certify_perfect_matching(gg.graph)
    profile = matching_profile(gg, gg.matching)
    gap = hardness_gap(args.v, args.beta, args.mode)
    cert: dict = {
        "config": _config(args),
        "nodes": n,
        "histogram": {str(d): c for d, c in gg.histogram().items()},
        "perfect_matching": 2 * len(matched) == n,
        "matching_size": len(matched),
        "matching_profile": dict(zip(("2,3", "3,3", "3,4", "4,4"), profile.as_tuple())),
        "embed_simple": vars(embed_simple(args.v, args.beta)),
        "gap": vars(gap),
    }
    ok = cert["perfect_matching"]
    if args.packing_plan:
        try:
            plan = even_degree_packing(args.v, args.beta, profile, gg)
            audit = plan.audit()
            cert["packing"] = {"alpha_min": plan.alpha_min, "alpha": plan.alpha,
                               "attempts": plan.attempts, "audit": audit,
                               "slot_counts": {str(i): c for i, c in plan.slot_counts().items()}}
            ok = ok and all(audit.values())
        except PackingInfeasibleError as e:
            cert["packing"] = {"error": str(e)}
            ok = False
    if args.out:
        doc = graph_to_dict(gg.graph)
        doc["roles"] = gg.roles
        Path(args.out).write_text(dumps(doc))
    _emit(json.dumps(cert, indent=1) + "\n", args.certificate)
    return 0 if ok else 1


def cmd_bounds(args) -> int:
    if args.crossover:
        a, b = args.crossover
        beta = B.crossover(a, b, args.lo, args.hi)
        sys.stdout.write(json.dumps({"a": a, "b": b, "beta": beta}) + "\n")
    elif args.bound:
        sys.stdout.write(json.dumps({"bound": args.bound, "beta": args.beta,
                                     "value": B.evaluate_bound(args.bound, args.beta)}) + "\n")
    else:
        sys.stdout.write(json.dumps(B.catalog(), indent=1) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plgtsp", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    bound_ids = [b.value for b in B.BoundId]

    g = sub.add_parser("gen", help="sample a P(alpha, beta) graph")
    g.add_argument("--alpha", type=float, required=True)
    g.add_argument("--beta", type=float, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--simplify", action="store_true", help="drop loops and parallel edges")
    g.add_argument("--giant", action="store_true", help="keep the largest component (implies --simplify)")
    g.add_argument("--kind", choices=KINDS, help="tag the output as a TSP instance")
    g.add_argument("--allow-any-beta", action="store_true")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run a TSP algorithm on an instance file")
    s.add_argument("--instance", required=True)
    s.add_argument("--kind", choices=KINDS)
    s.add_argument("--alg", required=True, choices=sorted(ALGORITHMS))
    s.add_argument("--oracle-cap", type=int, default=ORACLE_CAP)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="re-check a solve result against its instance")
    v.add_argument("--instance", required=True)
    v.add_argument("--result", required=True)
    v.add_argument("--kind", choices=KINDS)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("curves", help="emit bound curves as CSV")
    c.add_argument("--bound", action="append", choices=bound_ids)
    c.add_argument("--figure", choices=sorted(B.FIGURES))
    c.add_argument("--lo", type=float)
    c.add_argument("--hi", type=float)
    c.add_argument("--step", type=float)
    c.add_argument("--out")
    c.set_defaults(func=cmd_curves)

    st = sub.add_parser("stats", help="Monte-Carlo neighbour statistics")
    st.add_argument("--alpha", type=float, required=True)
    st.add_argument("--beta", type=float, required=True)
    st.add_argument("--trials", type=int, required=True)
    st.add_argument("--seed", type=int, required=True)
    st.add_argument("--jobs", type=int, default=1)
    st.add_argument("--per-trial", action="store_true")
    st.add_argument("--out")
    st.set_defaults(func=cmd_stats)

    gd = sub.add_parser("gadget", help="build and certify the reduction gadget graph")
    gd.add_argument("--v", type=int, required=True)
    gd.add_argument("--beta", type=float, required=True)
    gd.add_argument("--mode", choices=("simple", "packing"), default="packing")
    gd.add_argument("--definition", help="gadget-definition JSON")
    gd.add_argument("--packing-plan", action="store_true", help="also build and audit a packing plan")
    gd.add_argument("--out", help="write the gadget graph JSON here")
    gd.add_argument("--certificate", help="write the certificate here instead of stdout")
    gd.set_defaults(func=cmd_gadget)

    b = sub.add_parser("bounds", help="print the bound catalog or evaluate one bound")
    b.add_argument("--bound", choices=bound_ids)
    b.add_argument("--beta", type=float)
    b.add_argument("--crossover", nargs=2, metavar=("A", "B"), choices=bound_ids)
    b.add_argument("--lo", type=float)
    b.add_argument("--hi", type=float)
    b.set_defaults(func=cmd_bounds)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GadgetValidationError as e:
        print(f"plgtsp: gadget definition rejected: {e}", file=sys.stderr)
        return 2
    except (CliError, NodeCapError, B.BoundDomainError, ValueError, OSError) as e:
        print(f"plgtsp: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
