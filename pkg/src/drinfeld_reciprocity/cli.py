from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Dict

from .version import __version__

# envelope codes that mean the request itself was wrong
_USAGE_CODES = {"schema_error", "unknown_suite", "invalid_params"}


def _configure_logging(verbosity: int) -> None:
    if verbosity <= 0:
        return
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(name)s [%(levelname)s] %(message)s"))
    root = logging.getLogger("drinfeld_reciprocity")
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbosity > 1 else logging.INFO)


def _emit(resp: Dict[str, Any]) -> int:
    if resp.get("ok"):
        sys.stdout.write(json.dumps(resp.get("result", {}), indent=2, ensure_ascii=False) + "\n")
        return 0
    err = resp.get("error") or {}
    sys.stderr.write(f"error [{err.get('code')}]: {err.get('message')}\n")
    for violation in (err.get("details") or {}).get("violations", []):
        sys.stderr.write(f"  - {violation}\n")
    return 2 if err.get("code") in _USAGE_CODES else 1


def _cmd_serve(_: argparse.Namespace) -> int:
    from .server import serve

    return serve()


def _cmd_mcp(_: argparse.Namespace) -> int:
    # Start MCP stdio server
    from .mcp_server import main as mcp_main

    return mcp_main()


def _cmd_verify(args: argparse.Namespace) -> int:
    from .config import build_module, parse_config
    from .errors import DrinfeldError
    from .suites import run_suites, write_report

    try:
        config = parse_config(args.config).with_overrides(
            seed=args.seed, samples=args.samples, suites=args.suite
        )
        module = build_module(config)
        reports = run_suites(config, module=module)
    except DrinfeldError as exc:
        return _emit(exc.to_response())

    if args.report:
        write_report(reports, args.report)
    for report in reports:
        sys.stdout.write(json.dumps(report.summary(), ensure_ascii=False) + "\n")
    return 0 if all(r.passed for r in reports) else 1


def _cmd_compute_pairing(args: argparse.Namespace) -> int:
    from .tools.compute import tool_compute_pairing

    return _emit(
        tool_compute_pairing(
            {
                "config": args.config,
                "n": args.n,
                "alpha": args.alpha,
                "beta": args.beta,
                "log_free": args.log_free,
                "realize": args.realize,
            }
        )
    )


def _cmd_compute_delta(args: argparse.Namespace) -> int:
    from .tools.compute import tool_compute_delta

    return _emit(tool_compute_delta({"config": args.config, "n": args.n, "beta": args.beta}))


def _cmd_compute_kummer(args: argparse.Namespace) -> int:
    from .tools.compute import tool_kummer_lhs

    params: Dict[str, Any] = {
        "config": args.config,
        "n": args.n,
        "alpha": args.alpha,
        "exploratory": args.exploratory,
    }
    if args.m is not None:
        params["m"] = args.m
    resp = tool_kummer_lhs(params)
    code = _emit(resp)
    if code == 0 and not resp["result"].get("agree"):
        return 1
    return code


def _cmd_tower_show(args: argparse.Namespace) -> int:
    from .tools.compute import tool_show_tower

    return _emit(tool_show_tower({"config": args.config, "n": args.n}))


def _cmd_suites(_: argparse.Namespace) -> int:
    from .suites import list_suites

    for entry in list_suites():
        sys.stdout.write(f"{entry['name']:<18} {entry['description']}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drl", description="Explicit reciprocity for formal Drinfeld modules"
    )
    parser.add_argument("--version", action="version", version=f"drl {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="Log to stderr (-vv for debug)"
    )

    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="Run verification suites against a configuration")
    p_verify.add_argument("--config", required=True, help="key=value run configuration")
    p_verify.add_argument("--suite", action="append", help="Suite name; repeat for several (default: all)")
    p_verify.add_argument("--seed", type=int, help="Override run.seed")
    p_verify.add_argument("--samples", type=int, help="Override run.samples")
    p_verify.add_argument("--report", help="Write JSON-lines case records to this path")
    p_verify.set_defaults(func=_cmd_verify)

    p_suites = sub.add_parser("suites", help="List the verification suites")
    p_suites.set_defaults(func=_cmd_suites)

    p_compute = sub.add_parser("compute", help="Compute a single pairing quantity")
    compute = p_compute.add_subparsers(dest="what", required=True)

    p_pair = compute.add_parser("pairing", help="[alpha, beta]_n by the explicit formula")
    p_pair.add_argument("--config", required=True)
    p_pair.add_argument("--n", type=int, required=True)
    p_pair.add_argument("--alpha", required=True, help="Coordinates, e.g. '0,1;1@-1'")
    p_pair.add_argument("--beta", required=True)
    p_pair.add_argument("--log-free", action="store_true", help="Use alpha in place of log(alpha)")
    p_pair.add_argument("--realize", action="store_true", help="Also realize the torsion point")
    p_pair.set_defaults(func=_cmd_compute_pairing)

    p_delta = compute.add_parser("delta", help="delta_n(beta) modulo the different")
    p_delta.add_argument("--config", required=True)
    p_delta.add_argument("--n", type=int, required=True)
    p_delta.add_argument("--beta", required=True)
    p_delta.set_defaults(func=_cmd_compute_delta)

    p_kummer = compute.add_parser("kummer", help="(alpha, pi_n) through the norm route")
    p_kummer.add_argument("--config", required=True)
    p_kummer.add_argument("--n", type=int, required=True)
    p_kummer.add_argument("--m", type=int, help="Auxiliary level (default: the threshold level)")
    p_kummer.add_argument("--alpha", required=True)
    p_kummer.add_argument("--exploratory", action="store_true", help="Allow m below the threshold")
    p_kummer.set_defaults(func=_cmd_compute_kummer)

    p_tower = sub.add_parser("tower", help="Inspect the torsion tower")
    tower = p_tower.add_subparsers(dest="what", required=True)
    p_show = tower.add_parser("show", help="Show one level of the tower")
    p_show.add_argument("--config", required=True)
    p_show.add_argument("--n", type=int, required=True)
    p_show.set_defaults(func=_cmd_tower_show)

    p_serve = sub.add_parser("serve", help="Start the JSON-lines server on stdin/stdout")
    p_serve.set_defaults(func=_cmd_serve)

    p_mcp = sub.add_parser("mcp-serve", help="Start the MCP stdio server")
    p_mcp.set_defaults(func=_cmd_mcp)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    _configure_logging(ns.verbose)
    return ns.func(ns)


if __name__ == "__main__":
    raise SystemExit(main())
