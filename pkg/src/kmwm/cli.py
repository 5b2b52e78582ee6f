"""Command-line entry point: ``kmwm <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .codes import CodeSpec
from .graph import DecodingGraph, build_six_qubit_fixture
from .qubit_decoder import LABEL_ORDER


def _load_graph(path) -> DecodingGraph:
    return DecodingGraph.from_json(Path(path).read_text())


def _load_code(path) -> CodeSpec:
    return CodeSpec.from_dict(json.loads(Path(path).read_text()))


def _parse_ks(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _floats(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.split(",") if v.strip()])


def cmd_enumerate(args) -> int:
    from .tree import MatchingEnumerator

    graph = _load_graph(args.graph)
    enum = MatchingEnumerator(graph)
    found = enum.take(args.k)
    for rank, sol in enumerate(found, 1):
        print(f"{rank} {sol.weight:.17g} {' '.join(map(str, sol.edges))}".rstrip())
    if args.emit_explored:
        for sol in enum.explored(len(found)):
            print(f"explored {sol.weight:.17g} {' '.join(map(str, sol.edges))}".rstrip())
    if not found:
        print("no matching exists", file=sys.stderr)
        return 1
    return 0


def _print_tally(tally) -> None:
    for label in LABEL_ORDER:
        if label in tally.probabilities:
            print(f"{label}: {tally.probabilities[label]:.17g}")
    print(f"decision: {tally.decision}")


def cmd_decode_one(args) -> int:
    from .qubit_decoder import decode_graphlike

    tally = decode_graphlike(_load_graph(args.graph), _load_code(args.code), args.k,
                             args.include_explored, args.error_type)
    if tally.decision is None:
        print("no matching exists", file=sys.stderr)
        return 1
    _print_tally(tally)
    return 0


def cmd_decode_gkp(args) -> int:
    from .gkp import SurfaceGkpCode, run_correlated, run_separable

    ctx = SurfaceGkpCode(_load_code(args.code))
    if (args.shift is None) == (args.syndrome is None):
        print("give exactly one of --shift or --syndrome", file=sys.stderr)
        return 2
    if args.shift is not None:
        shift = _floats(args.shift)
        cand = ctx.lattice.syndrome_and_candidate(shift)
    else:
        cand = ctx.candidate(_floats(args.syndrome))
    if ctx.separable and not args.correlated:
        tally = run_separable(ctx, cand, args.sigma, args.k, args.n_v).tally(args.k, args.include_explored)
    else:
        res = run_correlated(ctx, cand, args.sigma, args.k, args.n_v)
        tally = res.tally(args.include_explored)
        if args.dump_reps:
            for y, prob, label in res.emitted:
                print(f"rep {label} {prob:.17g} {' '.join(map(str, np.asarray(y).tolist()))}")
    _print_tally(tally)
    if args.shift is not None:
        print(f"true class: {ctx.true_class(cand, shift)}")
    return 0


def cmd_oracle(args) -> int:
    from . import oracle

    if args.suite == "matchings":
        reports = oracle.matching_suite(args.instances or 50, 2024 if args.seed is None else args.seed)
    elif args.suite == "mld-qubit":
        reports = oracle.mld_qubit_suite()
    else:
        reports = oracle.mld_gkp_suite(args.instances or 100, 7 if args.seed is None else args.seed)
    width = max(len(r.instance) for r in reports)
    for r in reports:
        status = "PASS" if r.agree else "FAIL"
        print(f"{r.instance:<{width}}  {status}  oracle={r.oracle}  tested={r.tested}")
    bad = sum(not r.agree for r in reports)
    print(f"{len(reports) - bad}/{len(reports)} agree")
    return 1 if bad else 0


def cmd_simulate(args) -> int:
    from .harness import CodeChoice, NoiseModel, compute_metrics, run_trials, write_results

    choice = CodeChoice(args.code, args.distance, args.scale)
    noise = NoiseModel.parse(args.noise)
    ks = _parse_ks(args.k)
    common = dict(workers=args.threads, include_explored=args.include_explored, n_v=args.n_v,
                  timing=args.timing)
    summary = run_trials(choice, noise, ks, args.trials, args.seed,
                         keep_weights=args.weights, **common)
    if args.reference == "mld":
        ref = run_trials(choice, noise, [], args.trials, args.seed, reference="mld", **common)
    else:
        ref = summary
    metrics = compute_metrics(ref, summary)
    write_results([summary], args.out, [metrics])
    for k, f, s in zip(summary.ks, summary.fidelity, summary.stderr):
        print(f"K={k}: fidelity {f:.6f} +- {s:.6f}")
    return 0


def cmd_fixture(args) -> int:
    graph, code = build_six_qubit_fixture()
    Path(args.graph).write_text(graph.to_json() + "\n")
    if args.code:
        Path(args.code).write_text(json.dumps(code.to_dict(), indent=1) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kmwm", description="K-minimum-weight-matching decoding.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list the K lightest matchings of a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--emit-explored", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("decode-one", help="decode one graph with a qubit code")
    p.add_argument("--graph", required=True)
    p.add_argument("--code", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--include-explored", action="store_true")
    p.add_argument("--error-type", choices=("X", "Z"))
    p.set_defaults(func=cmd_decode_one)

    p = sub.add_parser("decode-gkp", help="decode one surface-GKP shift or syndrome")
    p.add_argument("--code", required=True)
    p.add_argument("--shift", help="comma-separated q1..qN,p1..pN")
    p.add_argument("--syndrome", help="comma-separated syndrome phases")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n-v", type=int, default=4)
    p.add_argument("--include-explored", action="store_true")
    p.add_argument("--correlated", action="store_true", help="use the correlated decoder for any shape")
    p.add_argument("--dump-reps", action="store_true")
    p.set_defaults(func=cmd_decode_gkp)

    p = sub.add_parser("oracle", help="run a brute-force agreement suite")
    p.add_argument("--suite", choices=("matchings", "mld-qubit", "mld-gkp"), required=True)
    p.add_argument("--instances", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="Monte-Carlo fidelity versus K")
    p.add_argument("--code", required=True,
                   choices=("surface-square", "surface-hex", "surface-rect", "qubit-surface"))
    p.add_argument("--distance", type=int, required=True)
    p.add_argument("--noise", required=True, help="sigma=<v> | epsilon=<v> | epsXYZ=<x,y,z>")
    p.add_argument("--k", required=True, help="K or comma-separated list")
    p.add_argument("--include-explored", action="store_true")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--scale", type=float, default=1.0, help="surface-rect q/p scale")
    p.add_argument("--n-v", type=int, default=4)
    p.add_argument("--reference", choices=("kmax", "mld"), default="kmax")
    p.add_argument("--timing", action="store_true", help="record wall times (output no longer reproducible)")
    p.add_argument("--weights", action="store_true", help="store per-trial matching weights")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fixture", help="write the six-qubit example graph (and code)")
    p.add_argument("--graph", required=True)
    p.add_argument("--code")
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
