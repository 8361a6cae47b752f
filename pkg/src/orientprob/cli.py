"""Command-line surface.

Exit codes: 0 success or verified, 1 verification violation, 2 usage error,
3 input error, 4 budget or cap exhausted without a result.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import InputError, ResourceLimitError
from .exact import (
    DEFAULT_ENUM_CAP,
    DEFAULT_MEMO_CAP,
    brute_force_prob,
    exact_connection_prob,
    exact_joint_prob,
)
from .generators import complete_graph, random_graph
from .graphs import EventExpr, Graph, parse_graph
from .grid import GridSpec, GridReachStats, build_grid, find_nonmonotonicity_witness, grid_reach_stats
from .inequalities import (
    SourceSetPolicy,
    alm_linusson_covariance,
    build_proof_quadruple,
    check_four_functions,
    merge_reports,
    verify_mcdiarmid,
    verify_theorem_1,
    verify_theorem_2,
)
from .montecarlo import estimate_event, estimate_slack

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_EXHAUSTED = 4


class UsageError(Exception):
    """Flag combination errors: wrong flags for the chosen subcommand."""


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def _parse_xy(text: str) -> tuple[int, int]:
    parts = _parse_int_list(text)
    if len(parts) != 2:
        raise InputError(f"expected 'x,y', got {text!r}")
    return parts[0], parts[1]


def _parse_grid_dims(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise InputError(f"expected WIDTHxHEIGHT, got {text!r}") from None


def _parse_random_spec(text: str) -> dict:
    spec: dict = {}
    for item in text.split(","):
        if "=" not in item:
            raise InputError(f"random spec items must look like n=5, got {item!r}")
        key, value = item.split("=", 1)
        key = key.strip()
        if key == "n":
            spec["n"] = int(value)
        elif key == "m":
            spec["edge_count"] = int(value)
        elif key == "p":
            spec["edge_prob"] = float(value)
        else:
            raise InputError(f"unknown random spec key {key!r}")
    if "n" not in spec:
        raise InputError("random spec needs n=<vertices>")
    if ("edge_count" in spec) == ("edge_prob" in spec):
        raise InputError("random spec needs exactly one of m=<edges> or p=<probability>")
    return spec


def _add_graph_source(parser: argparse.ArgumentParser, allow_random: bool = True) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--graph", metavar="PATH", help="edge-list file")
    group.add_argument("--grid", metavar="WxH", help="grid box, bias from --bias")
    group.add_argument("--complete", type=int, metavar="N", help="complete graph, bias from --bias")
    if allow_random:
        group.add_argument(
            "--random", metavar="SPEC", help="seeded random graph, e.g. n=5,m=8 or n=5,p=0.4"
        )
    parser.add_argument("--bias", type=float, default=0.5, help="edge bias for --grid/--complete (default 0.5)")
    parser.add_argument(
        "--bias-policy",
        choices=["uniform", "constant"],
        default="uniform",
        help="per-edge biases for --random: uniform in [0,1] or constant --bias",
    )


def _graphs_from_args(args: argparse.Namespace, trials: int = 1) -> list[Graph]:
    if args.graph is not None:
        text = Path(args.graph).read_text(encoding="utf-8")
        return [parse_graph(text)]
    if args.grid is not None:
        w, h = _parse_grid_dims(args.grid)
        return [build_grid(GridSpec(w, h, args.bias)).graph]
    if args.complete is not None:
        return [complete_graph(args.complete, args.bias)]
    spec = _parse_random_spec(args.random)
    if getattr(args, "seed", None) is None:
        raise UsageError("--random requires --seed")
    biases = "uniform" if args.bias_policy == "uniform" else float(args.bias)
    return [
        random_graph(spec["n"], spec.get("edge_count"), spec.get("edge_prob"),
                     biases=biases, seed=args.seed, index=i)
        for i in range(trials)
    ]


def _emit(args: argparse.Namespace, payload: dict | str) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2)
    if getattr(args, "output", None):
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _require_seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        raise UsageError("this subcommand is randomized; --seed is required")
    return args.seed


def _cmd_exact(args: argparse.Namespace) -> int:
    graph = _graphs_from_args(args)[0]
    sources = _parse_int_list(args.source)
    if args.method == "enumeration":
        event = EventExpr.connection(sources, args.target)
        if args.target2 is not None:
            event = event & EventExpr.connection(sources, args.target2)
        result = brute_force_prob(graph, event, enum_cap=args.enum_cap)
    elif args.target2 is not None:
        result = exact_joint_prob(graph, sources, args.target, args.target2, memo_cap=args.memo_cap)
    else:
        result = exact_connection_prob(graph, sources, args.target, memo_cap=args.memo_cap)
    _emit(args, result.as_dict())
    return EXIT_OK


def _cmd_mc(args: argparse.Namespace) -> int:
    graph = _graphs_from_args(args)[0]
    seed = _require_seed(args)
    sources = _parse_int_list(args.source)
    event = EventExpr.connection(sources, args.target)
    if args.target2 is not None:
        event = event & EventExpr.connection(sources, args.target2)
    report = estimate_event(graph, event, args.samples, seed, args.streams)
    _emit(args, report.as_dict())
    return EXIT_OK


def _cmd_mc_slack(args: argparse.Namespace) -> int:
    graph = _graphs_from_args(args)[0]
    seed = _require_seed(args)
    sources = _parse_int_list(args.source)
    slack, se = estimate_slack(graph, sources, args.a, args.b, args.samples, seed, args.streams)
    _emit(args, {"slack": slack, "std_error": se, "samples": args.samples,
                 "seed": seed, "streams": args.streams})
    return EXIT_OK


def _cmd_verify_t1(args: argparse.Namespace) -> int:
    if args.mode == "montecarlo" or args.random is not None:
        _require_seed(args)
    graphs = _graphs_from_args(args, trials=args.trials)
    reports = [
        verify_theorem_1(
            g,
            mode=args.mode,
            tolerance=args.tolerance,
            samples=args.samples,
            seed=args.seed if args.seed is not None else 0,
            streams=args.streams,
            memo_cap=args.memo_cap,
        )
        for g in graphs
    ]
    merged = merge_reports(reports)
    _emit(args, merged.as_dict())
    return EXIT_OK if merged.ok else EXIT_VIOLATION


def _cmd_verify_t2(args: argparse.Namespace) -> int:
    if args.random is not None:
        _require_seed(args)
    graphs = _graphs_from_args(args, trials=args.trials)
    if args.random_sets is not None:
        policy = SourceSetPolicy.random(args.random_sets, _require_seed(args))
    else:
        policy = SourceSetPolicy.up_to_size(args.max_set_size)
    merged = merge_reports(
        verify_theorem_2(g, policy, args.tolerance, memo_cap=args.memo_cap) for g in graphs
    )
    _emit(args, merged.as_dict())
    return EXIT_OK if merged.ok else EXIT_VIOLATION


def _cmd_fourfunc(args: argparse.Namespace) -> int:
    graph = _graphs_from_args(args)[0]
    sources = _parse_int_list(args.source)
    quad = build_proof_quadruple(graph, sources, args.a, args.b)
    report = check_four_functions(quad, tolerance=args.tolerance)
    _emit(args, report.as_dict())
    return EXIT_OK if report.ok else EXIT_VIOLATION


def _cmd_mcdiarmid(args: argparse.Namespace) -> int:
    graph = _graphs_from_args(args)[0]
    tv = verify_mcdiarmid(graph, args.root, enum_cap=args.enum_cap)
    _emit(args, {"tv_distance": tv, "root": args.root, "edge_count": graph.edge_count,
                 "tolerance": args.tolerance})
    return EXIT_OK if tv <= args.tolerance else EXIT_VIOLATION


def _cmd_alm_linusson(args: argparse.Namespace) -> int:
    if args.mode == "montecarlo":
        _require_seed(args)
    result = alm_linusson_covariance(
        args.n,
        mode=args.mode,
        samples=args.samples,
        seed=args.seed if args.seed is not None else 0,
        streams=args.streams,
        enum_cap=args.enum_cap,
    )
    _emit(args, result.as_dict())
    return EXIT_OK


def _cmd_grid_stats(args: argparse.Namespace) -> int:
    seed = _require_seed(args)
    w, h = _parse_grid_dims(args.grid)
    try:
        biases = [float(x) for x in args.bias.split(",")]
    except ValueError:
        raise InputError(f"--bias must be a comma-separated list of numbers, got {args.bias!r}") from None
    rows = []
    for p in biases:
        spec = GridSpec(w, h, p)
        origin = build_grid(spec).id_of(*_parse_xy(args.origin))
        rows.append(grid_reach_stats(spec, origin, args.samples, seed, args.streams))
    if args.format == "csv":
        _emit(args, "\n".join([GridReachStats.CSV_HEADER] + [r.csv_row() for r in rows]))
    else:
        _emit(args, {"rows": [r.as_dict() for r in rows]})
    return EXIT_OK


def _cmd_witness(args: argparse.Namespace) -> int:
    seed = _require_seed(args)
    w, h = _parse_grid_dims(args.grid)
    spec = GridSpec(w, h, args.bias)
    grid = build_grid(spec)
    a = grid.id_of(*_parse_xy(args.a))
    b = grid.id_of(*_parse_xy(args.b))
    result = find_nonmonotonicity_witness(spec, a, b, args.flip, args.budget, seed)
    if result.found:
        w_ = result.witness
        edge = grid.graph.edges[w_.edge_index]
        _emit(args, {
            "found": True,
            "attempts": result.attempts,
            "edge_index": w_.edge_index,
            "edge": [edge.low, edge.high],
            "flip_direction": w_.flip_direction,
            "a": w_.a,
            "b": w_.b,
            "orientation_bits": list(w_.orientation.bits),
        })
        return EXIT_OK
    _emit(args, {"found": False, "attempts": result.attempts, "budget": result.budget})
    return EXIT_EXHAUSTED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orientprob",
        description="Connection probabilities in randomly oriented graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--output", metavar="PATH", help="write machine output to a file instead of stdout")

    p = sub.add_parser("exact", help="exact connection or joint probability")
    _add_graph_source(p)
    p.add_argument("--source", required=True, help="comma-separated source vertex ids")
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--target2", type=int, help="second target for a joint event")
    p.add_argument("--method", choices=["recursion", "enumeration"], default="recursion")
    p.add_argument("--enum-cap", type=int, default=DEFAULT_ENUM_CAP)
    p.add_argument("--memo-cap", type=int, default=DEFAULT_MEMO_CAP)
    p.add_argument("--seed", type=int, help="seed (needed for --random graphs)")
    common(p)
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("mc", help="Monte Carlo event estimate")
    _add_graph_source(p)
    p.add_argument("--source", required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--target2", type=int)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--streams", type=int, default=1)
    common(p)
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("mc-slack", help="paired Monte Carlo slack estimate")
    _add_graph_source(p)
    p.add_argument("--source", required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--streams", type=int, default=1)
    common(p)
    p.set_defaults(func=_cmd_mc_slack)

    p = sub.add_parser("verify-t1", help="slack sweep over all ordered vertex triples")
    _add_graph_source(p)
    p.add_argument("--trials", type=int, default=1, help="number of --random graphs to sweep")
    p.add_argument("--mode", choices=["exact", "montecarlo"], default="exact")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--streams", type=int, default=1)
    p.add_argument("--memo-cap", type=int, default=DEFAULT_MEMO_CAP)
    common(p)
    p.set_defaults(func=_cmd_verify_t1)

    p = sub.add_parser("verify-t2", help="slack sweep with set sources")
    _add_graph_source(p)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--max-set-size", type=int, default=3)
    p.add_argument("--random-sets", type=int, help="sample this many source sets instead")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--seed", type=int)
    p.add_argument("--memo-cap", type=int, default=DEFAULT_MEMO_CAP)
    common(p)
    p.set_defaults(func=_cmd_verify_t2)

    p = sub.add_parser("fourfunc", help="build and check the conditioned quadruple")
    _add_graph_source(p)
    p.add_argument("--source", required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(func=_cmd_fourfunc)

    p = sub.add_parser("mcdiarmid", help="orientation reach law vs percolation cluster law")
    _add_graph_source(p)
    p.add_argument("--root", type=int, required=True)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--enum-cap", type=int, default=DEFAULT_ENUM_CAP)
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(func=_cmd_mcdiarmid)

    p = sub.add_parser("alm-linusson", help="covariance of a->s and s->b on an unbiased complete graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=["exact", "montecarlo"], default="exact")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--streams", type=int, default=1)
    p.add_argument("--enum-cap", type=int, default=DEFAULT_ENUM_CAP)
    common(p)
    p.set_defaults(func=_cmd_alm_linusson)

    p = sub.add_parser("grid-stats", help="sampled reach statistics on a grid box")
    p.add_argument("--grid", required=True, metavar="WxH")
    p.add_argument("--bias", default="0.5", help="comma-separated list of biases, one CSV row each")
    p.add_argument("--origin", default="0,0", metavar="x,y")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--streams", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    common(p)
    p.set_defaults(func=_cmd_grid_stats)

    p = sub.add_parser("witness", help="search for a connection-breaking single-edge flip")
    p.add_argument("--grid", required=True, metavar="WxH")
    p.add_argument("--bias", type=float, default=0.5)
    p.add_argument("--a", required=True, metavar="x,y")
    p.add_argument("--b", required=True, metavar="x,y")
    p.add_argument("--flip", choices=["toward-high", "toward-low"], default="toward-high")
    p.add_argument("--budget", type=int, default=1_000_000)
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(func=_cmd_witness)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
