"""Command-line front end.

Machine-readable output is JSON with every number written as a decimal
string (rewards grow super-exponentially), tables are CSV and outcome
trees can be rendered as DOT.  Exit status: 0 on success, 1 when a
verification fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .dynamics import check_unique_convergence
from .equilibria import (build_line_spe, build_ring2_ne, build_ring_special, build_tree_spe,
                         growth_table, min_spanning_incentive)
from .game import GameSpec, TieBreak
from .normal_form import (RESOLUTIONS, best_response_cycle, iterated_strict_dominance,
                          pure_nash, reduce_to_normal_form)
from .stage_game import is_nash, is_subgame_perfect
from .strategies import profile_from_dict
from .topology import Topology, TopologyError, line, ring, validate_topology


class UsageError(Exception):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(args, artifacts: dict[str, str], default: str) -> None:
    """Print the artifact matching ``--format``; write all of them under ``--out-dir``."""
    fmt = args.format or default
    if fmt not in artifacts:
        raise UsageError(f"--format {fmt} is not available for {args.command}")
    sys.stdout.write(artifacts[fmt])
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = args.command.replace("-", "_")
        for ext, text in artifacts.items():
            (out / f"{stem}.{ext}").write_text(text)


def _load_topology(path: str) -> Topology:
    try:
        return Topology.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read topology: {exc}") from exc
    except (TopologyError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad topology file {path}: {exc}") from exc


def _load_profile_doc(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read profile {path}: {exc}") from exc


def _spec_from_doc(doc: dict) -> tuple[GameSpec, object]:
    try:
        topo = Topology.from_dict(doc["topology"])
        spec = GameSpec(topo, int(doc["r_d"]), tiebreak=TieBreak(doc.get("tiebreak", "lowest-id")))
        return spec, profile_from_dict(doc["profile"])
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"malformed profile document: {exc}") from exc


# -- commands ----------------------------------------------------------------

def cmd_growth(args) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "f", "f_diff", "factorial_k_minus_2"])
    for row in growth_table(args.max_k):
        w.writerow([row.k, row.f, "" if row.diff is None else row.diff,
                    "" if row.factorial is None else row.factorial])
    _emit(args, {"csv": buf.getvalue()}, "csv")
    return 0


def cmd_ring_matrix(args) -> int:
    if args.rd < 1:
        raise UsageError("--rd must be at least 1")
    m = reduce_to_normal_form(None, args.rd, args.resolution)
    reduced, removed = iterated_strict_dominance(m)
    start = (reduced.rows[0], reduced.cols[0])
    walk = best_response_cycle(m, start)
    doc = {
        "r_d": str(args.rd),
        "resolution": args.resolution,
        "reduced_actions": {"rows": [str(r) for r in reduced.rows],
                            "cols": [str(c) for c in reduced.cols]},
        "eliminated": [[who, str(a)] for who, a in removed],
        "pure_ne": [[str(r), str(c)] for r, c in pure_nash(m)],
        "br_cycle": [[str(r), str(c)] for r, c in walk.cycle],
        "br_start": [str(start[0]), str(start[1])],
    }
    _emit(args, {"json": dumps(doc), "csv": m.to_csv()}, "json")
    return 0


def cmd_min_incentive(args) -> int:
    topo = _load_topology(args.topology)
    info = validate_topology(topo)
    if info.shape == "general":
        raise UsageError("min-incentive supports line, tree and ring topologies")
    r = min_spanning_incentive(topo, args.bound, continuation=args.continuation)
    doc = {"shape": info.shape, "depth": str(info.depth), "bound": str(args.bound),
           "r_d": "none" if r is None else str(r)}
    _emit(args, {"json": dumps(doc)}, "json")
    return 0


def _construct(args) -> dict:
    shape = args.shape
    if shape == "line":
        if args.rd is None or args.depth is None:
            raise UsageError("line needs --rd and --depth")
        topo, r_d = line(args.depth), args.rd
        profile = build_line_spe(r_d, args.depth)
    elif shape == "tree":
        if args.rd is None or not args.topology:
            raise UsageError("tree needs --rd and --topology")
        topo, r_d = _load_topology(args.topology), args.rd
        try:
            profile = build_tree_spe(r_d, topo)
        except TopologyError as exc:
            raise UsageError(str(exc)) from exc
    elif shape == "ring2":
        if args.rd is None:
            raise UsageError("ring2 needs --rd")
        topo, r_d = ring(2), args.rd
        profile = build_ring2_ne(r_d)
    else:
        if args.depth is None:
            raise UsageError("ring-special needs --depth")
        try:
            special = build_ring_special(args.depth)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        topo, r_d, profile = ring(args.depth), special.r_d, special.profile
    return {"shape": shape, "topology": topo.to_dict(), "r_d": str(r_d),
            "tiebreak": TieBreak.LOWEST_ID.value, "profile": profile.to_dict()}


def cmd_construct(args) -> int:
    text = dumps(_construct(args))
    if args.out:
        Path(args.out).write_text(text)
    else:
        _emit(args, {"json": text}, "json")
    return 0


def cmd_verify(args) -> int:
    spec, profile = _spec_from_doc(_load_profile_doc(args.profile))
    if args.mode == "nash":
        result = is_nash(spec, profile)
    else:
        result = is_subgame_perfect(spec, profile)
    doc = {"mode": args.mode, **result.to_dict()}
    _emit(args, {"json": dumps(doc)}, "json")
    return 0 if result else 1


def cmd_simulate(args) -> int:
    if args.strategy == "file":
        if not args.profile:
            raise UsageError("--strategy file needs --profile")
        spec, profile = _spec_from_doc(_load_profile_doc(args.profile))
        if args.topology:
            spec = GameSpec(_load_topology(args.topology), spec.r_d, tiebreak=spec.tiebreak)
        if args.rd is not None:
            spec = spec.with_rd(args.rd)
    else:
        if not args.topology or args.rd is None:
            raise UsageError("--topology and --rd are required")
        topo = _load_topology(args.topology)
        spec = GameSpec(topo, args.rd)
        if args.strategy == "line-spe":
            try:
                profile = build_tree_spe(args.rd, topo)
            except TopologyError as exc:
                raise UsageError(f"line-spe needs a tree: {exc}") from exc
        else:
            info = validate_topology(topo)
            if info.shape != "ring" or topo != ring(info.depth, topo.destination):
                raise UsageError("ring-special needs the canonical ring layout")
            profile = build_ring_special(info.depth, args.rd).profile
    report = check_unique_convergence(spec, profile, args.trials, args.seed)
    doc = {
        "converged": report.converged,
        "rounds": str(report.max_rounds_used),
        "unanimous": report.unanimous,
        "trials": str(args.trials),
        "tree": report.reference.to_dict(),
    }
    if report.counterexample is not None:
        doc["counterexample"] = report.counterexample.to_dict()
    artifacts = {"json": dumps(doc), "dot": report.reference.to_dot(spec.topology.destination)}
    _emit(args, artifacts, "json")
    return 0 if report.unanimous else 1


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out-dir")
    common.add_argument("--format", choices=("json", "csv", "dot"))

    parser = argparse.ArgumentParser(prog="route-incentives",
                                     description="Route distribution incentive game toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("growth", parents=[common], help="tabulate the incentive growth function")
    p.add_argument("--max-k", type=int, required=True)
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("ring-matrix", parents=[common],
                       help="reduce the 3-stage ring to a bimatrix game")
    p.add_argument("--rd", type=int, required=True)
    p.add_argument("--resolution", choices=RESOLUTIONS, default="searched")
    p.set_defaults(func=cmd_ring_matrix)

    p = sub.add_parser("min-incentive", parents=[common],
                       help="brute-force minimum reward for a spanning equilibrium")
    p.add_argument("--topology", required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--continuation", choices=("favorable", "punishing"), default="favorable")
    p.set_defaults(func=cmd_min_incentive)

    p = sub.add_parser("construct", parents=[common], help="build an equilibrium profile")
    p.add_argument("--shape", choices=("line", "tree", "ring2", "ring-special"), required=True)
    p.add_argument("--rd", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--topology")
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="check a profile for equilibrium")
    p.add_argument("--profile", required=True)
    p.add_argument("--mode", choices=("nash", "spe"), default="spe")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", parents=[common],
                       help="run asynchronous dynamics under random fair schedules")
    p.add_argument("--topology")
    p.add_argument("--rd", type=int)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--strategy", choices=("line-spe", "ring-special", "file"), default="line-spe")
    p.add_argument("--profile")
    p.set_defaults(func=cmd_simulate)
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run the command and return its exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
