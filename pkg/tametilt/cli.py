#!/usr/bin/env python3
"""
tametilt CLI

Command-line interface for classifying, dualizing and localizing large
tilting modules over a tube registry. JSON goes to stdout, status to stderr.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from . import __version__
from .branch import BranchModule, enumerate_branch_modules
from .classify import (
    TiltingDescriptor,
    cotilting_dual,
    decompose,
    descriptor_from_pair,
    lukas_form,
    predicates,
    summand_realizability,
)
from .errors import PointError, TametiltError
from .localize import (
    localization_tilting,
    localize_registry,
    parse_qs_set,
    quotient_decomposition,
    universal_ring,
)
from .oracle import OracleBounds, verify_suite
from .registry import SCHEMA, LambdaSet, MultiplicityMap, RegistryParser, TubeRegistry, list_presets, preset
from .resolving import parse_filter, pair_from_resolving
from .tube import sort_points

logger = logging.getLogger(__name__)

COMMANDS = [
    "branch-enumerate", "classify", "dual", "decompose", "localize",
    "quotient", "predicates", "verify", "presets",
]


def status(message: str) -> None:
    """Human status line on stderr"""
    print(message, file=sys.stderr)


def load_json_argument(value: str, what: str) -> Any:
    """Inline JSON, or the contents of a JSON file when value names one"""
    try:
        if os.path.exists(value):
            with open(value, "r", encoding="utf-8") as f:
                return json.load(f)
        return json.loads(value)
    except json.JSONDecodeError as e:
        raise PointError(f"Invalid JSON for {what}: {e}", check="cli.json")


def parse_tube_spec(text: str) -> tuple:
    """'id:rank' -> (id, rank)"""
    tube_id, sep, rank = text.partition(":")
    if not sep or not rank.isdigit():
        raise TametiltError(f"Invalid --tube '{text}'. Expected 'id:rank', e.g. 'a:3'", check="registry.custom")
    return tube_id, int(rank)


def parse_alpha(data: Any) -> MultiplicityMap:
    """A flat {qs-key: n} map, or {"alpha": {...}, "alpha_generic": n}"""
    if not isinstance(data, dict):
        raise PointError("Alpha must be a JSON object of quasi-simple keys", check="cli.json")
    if "alpha" in data or "alpha_generic" in data:
        return MultiplicityMap.from_dict(data.get("alpha", {}), data.get("alpha_generic", 1))
    return MultiplicityMap.from_dict(data)


def load_registry(args: argparse.Namespace) -> TubeRegistry:
    """Registry from --config or --preset, with --homogeneous and --alpha applied"""
    if args.config:
        if not os.path.exists(args.config):
            raise TametiltError(f"Config file '{args.config}' not found", check="registry.config")
        registry = RegistryParser().parse_file(args.config)
        status(f"📋 Loaded registry from: {args.config}")
        if args.homogeneous:
            registry = registry.with_homogeneous(*args.homogeneous)
    else:
        tubes = [parse_tube_spec(t) for t in args.tube] if args.tube else None
        registry = preset(args.preset, tubes=tubes, rest=args.rest, homogeneous=args.homogeneous or ())
        status(f"📋 Using preset: {registry.name}")
    if args.alpha:
        alpha = parse_alpha(load_json_argument(args.alpha, "--alpha"))
        registry = registry.with_alpha(alpha)
    logger.info("Registry %s with ranks %s", registry.name, registry.ranks)
    return registry


def parse_pair(data: Any, registry: TubeRegistry) -> tuple:
    if not isinstance(data, dict) or "branch" not in data:
        raise PointError(
            "Pair must be an object with 'branch' (list of points) and 'lambda' ({named, rest})",
            check="pair.syntax",
        )
    if not isinstance(data["branch"], list):
        raise PointError("'branch' must be a list of points like 'a:1[2]'", check="pair.syntax")
    branch = BranchModule(frozenset(registry.parse_point(str(p)) for p in data["branch"]))
    lam = LambdaSet.from_json(data.get("lambda", {}))
    return branch, lam


def descriptor_from_args(args: argparse.Namespace, registry: TubeRegistry) -> TiltingDescriptor:
    """The descriptor named by --pair, or the one whose filter is --filter"""
    if args.pair and args.filter:
        raise TametiltError("Give either --pair or --filter, not both", check="cli.arguments")
    if args.filter:
        f = parse_filter(load_json_argument(args.filter, "--filter"), registry)
        branch, lam = pair_from_resolving(f)
    elif args.pair:
        branch, lam = parse_pair(load_json_argument(args.pair, "--pair"), registry)
    else:
        raise TametiltError("This command needs --pair or --filter", check="cli.arguments")
    return descriptor_from_pair(branch, lam, registry)


def run_command(args: argparse.Namespace) -> Dict[str, Any]:
    """Dispatch a subcommand; returns the result payload"""
    command = args.command

    if command == "presets":
        return {
            name: {
                "tubes": [{"id": t, "rank": r} for t, r in reg.nonhomogeneous],
                "homogeneous_named": sorted(reg.homogeneous_named),
                "rest": reg.rest,
            }
            for name, reg in sorted(list_presets().items())
        }

    registry = load_registry(args)

    if command == "branch-enumerate":
        modules = enumerate_branch_modules(registry)
        status(f"🌿 {len(modules)} branch modules")
        return {"registry": registry.to_json(), "result": [y.to_json() for y in modules]}

    if command == "verify":
        bounds = OracleBounds(rank_max=args.rank_max)
        report = verify_suite(registry, bounds)
        totals = report.totals
        status(f"🔍 {totals['checks']} checks, {report.instances} instances, {totals['failed']} failed")
        payload = {
            "registry": registry.to_json(),
            "bounds": {"rank_max": bounds.rank_max},
            "records": [record.to_json() for record in report.records],
            "totals": totals,
            "instances": report.instances,
        }
        if args.output == "jsonl":
            payload["lines"] = report.to_json_lines()
        return payload

    if command in ("localize", "quotient"):
        if not args.at:
            raise TametiltError(f"{command} needs --at", check="cli.arguments")
        u = parse_qs_set(args.at, registry)
        if command == "quotient":
            parts = quotient_decomposition(u, registry.alpha, registry)
            return {
                "at": u.to_json(registry),
                "result": {str(p): parts[p] for p in sort_points(parts)},
            }
        tilting = localization_tilting(u, registry)
        payload = {
            "at": u.to_json(registry),
            "localized": localize_registry(registry, u).to_json(),
            "tilting": tilting.to_json() if isinstance(tilting, TiltingDescriptor) else tilting.to_json(registry),
        }
        if u.members == frozenset(registry.quasi_simples()):
            payload["universal_ring"] = universal_ring(registry).to_json()
        return payload

    descriptor = descriptor_from_args(args, registry)
    if command == "classify":
        return {
            "descriptor": descriptor.to_json(),
            "lukas_form": lukas_form(descriptor).to_json(registry),
        }
    if command == "dual":
        return {"descriptor": descriptor.to_json(), "dual": cotilting_dual(descriptor).to_json()}
    if command == "decompose":
        return {"decomposition": decompose(descriptor).to_json()}

    payload: Dict[str, Any] = {"predicates": predicates(descriptor).to_json(registry)}
    if args.delta is not None or args.z is not None:
        delta = parse_qs_set(args.delta or [], registry).members
        z = [registry.parse_point(p) for p in (args.z or [])]
        witness = summand_realizability(delta, z, registry)
        payload["predicates"]["realizable"] = witness is not None
        if witness is not None:
            payload["witness"] = {"branch": witness[0].to_json(), "lambda": witness[1].to_json()}
    return payload


def render(doc: Dict[str, Any], output: str = "json") -> str:
    """One indented document, or with jsonl one compact line per record"""
    if output == "jsonl":
        if "lines" in doc:
            return "\n".join(doc["lines"])
        return json.dumps(doc, sort_keys=True, ensure_ascii=False)
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)


def configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.debug else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point"""
    parser = create_argument_parser()
    args = parser.parse_args(argv)
    configure_logging(args)

    try:
        result = run_command(args)
        print(render({"schema": SCHEMA, "command": args.command, **result}, args.output))
        if args.command == "verify" and result["totals"]["failed"]:
            status(f"❌ Verification found {result['totals']['failed']} failing checks")
            return 1
        if args.command != "presets":
            status(f"✅ {args.command} done")
        return 0

    except TametiltError as e:
        print(render({"schema": SCHEMA, "command": args.command, "error": e.to_json()}, args.output))
        print(f"❌ Error: {e}", file=sys.stderr)
        if args.debug:
            import traceback
            traceback.print_exc()
        return 1
    except OSError as e:
        error = {"check": "cli.io", "message": str(e)}
        print(render({"schema": SCHEMA, "command": args.command, "error": error}, args.output))
        print(f"❌ Error: {e}", file=sys.stderr)
        if args.debug:
            import traceback
            traceback.print_exc()
        return 1


def create_argument_parser() -> argparse.ArgumentParser:
    """Create and configure the argument parser"""
    parser = argparse.ArgumentParser(
        prog="tametilt",
        description="Classify large tilting modules over tame hereditary algebras from tube data",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # List bundled presets
  tametilt presets

  # Branch modules of the Kronecker algebra
  tametilt branch-enumerate --preset kronecker

  # The Reiten-Ringel module: no branch, the whole homogeneous family
  tametilt classify --pair '{"branch":[],"lambda":{"named":[],"rest":true}}'

  # One full ray in a custom rank-3 tube
  tametilt decompose --preset custom --tube a:3 \\
    --pair '{"branch":["a:1[1]","a:1[2]"],"lambda":{"named":["a"],"rest":false}}'

  # Classify from a resolving filter instead of a pair
  tametilt classify --preset e6 --filter '{"b":{"rays":[],"region":["1[1]","1[2]","2[1]"]}}'

  # Universal localization at a clique and the quotient it produces
  tametilt localize --preset d4 --at clique:a
  tametilt quotient --preset d4 --at a:1 --alpha '{"a:1": 3}'

  # Exhaustive invariant checks up to rank 3
  tametilt verify --rank-max 3 --verbose
  tametilt verify --rank-max 3 --output jsonl > checks.jsonl
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    parser.add_argument("command", choices=COMMANDS, help="What to compute")

    config_group = parser.add_argument_group("Registry")
    config_group.add_argument(
        "--preset", "-p", default="kronecker",
        help="Bundled registry name, or 'custom' together with --tube (default: kronecker)",
    )
    config_group.add_argument("--config", "-c", help="Path to a registry JSON file")
    config_group.add_argument(
        "--tube", action="append", metavar="ID:RANK",
        help="Non-homogeneous tube of a custom registry (repeatable)",
    )
    config_group.add_argument(
        "--rest", action=argparse.BooleanOptionalAction, default=True,
        help="Include the unnamed homogeneous family in a custom registry",
    )
    config_group.add_argument(
        "--homogeneous", action="append", metavar="ID",
        help="Register a named homogeneous tube (repeatable)",
    )
    config_group.add_argument("--alpha", help="Multiplicity map as inline JSON or a JSON file")

    input_group = parser.add_argument_group("Input")
    input_group.add_argument("--pair", help="Pair {branch, lambda} as inline JSON or a JSON file")
    input_group.add_argument("--filter", help="Resolving filter as inline JSON or a JSON file")
    input_group.add_argument("--at", help="Quasi-simple set, comma separated: 'a:1,clique:b,*'")
    input_group.add_argument("--delta", help="Prüfer quasi-simples for the realizability query")
    input_group.add_argument("--z", action="append", metavar="POINT", help="Exceptional summand (repeatable)")

    oracle_group = parser.add_argument_group("Verification")
    oracle_group.add_argument(
        "--rank-max", type=int, default=4,
        help="Largest tube rank checked exhaustively (default: 4, at most 6)",
    )

    output_group = parser.add_argument_group("Output")
    output_group.add_argument("--output", "-o", choices=["json", "jsonl"], default="json",
        help="json: one indented document; jsonl: compact lines, one per verify check",
    )
    output_group.add_argument("--verbose", "-v", action="store_true", help="Verbose logging")
    output_group.add_argument("--debug", action="store_true", help="Debug logging and tracebacks")

    return parser


if __name__ == "__main__":
    sys.exit(main())
