from __future__ import annotations

import json
import logging
from types import SimpleNamespace
from typing import Any, Dict, List

import anyio
from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import TextContent, Tool

from .errors import DrinfeldError
from .tools import compute as tc
from .tools import verify as tv
from .version import __version__

logger = logging.getLogger(__name__)

server = Server("drinfeld-reciprocity")

_CONFIG_PROPS: Dict[str, Any] = {
    "config": {"type": "string", "description": "Path to a key=value run configuration"},
    "config_text": {"type": "string", "description": "Inline key=value configuration"},
}
_ELEMENT = {
    "type": "string",
    "description": "Coordinates against 1, v_n, v_n^2, ... separated by ';', each a comma list "
    "of pi-digits with an optional '@k' shift",
}


def _schema(**props: Any) -> Dict[str, Any]:
    return {
        "type": "object",
        "properties": {**_CONFIG_PROPS, **props},
        "additionalProperties": True,
    }


# Tool registry (name -> (handler, input schema, description))
TOOLS: Dict[str, Any] = {
    "validate_module": (
        tc.tool_validate_module,
        _schema(),
        "Validate a module configuration and report its reduction flags and bounds.",
    ),
    "show_tower": (
        tc.tool_show_tower,
        _schema(n={"type": "integer", "minimum": 1}),
        "Show level n of the torsion tower: g_n, degree, valuations of v_n and of the different.",
    ),
    "compute_delta": (
        tc.tool_compute_delta,
        _schema(n={"type": "integer", "minimum": 1}, beta=_ELEMENT),
        "Compute delta_n(beta) = f'(v_n)/beta modulo the different.",
    ),
    "compute_pairing": (
        tc.tool_compute_pairing,
        _schema(
            n={"type": "integer", "minimum": 1},
            alpha=_ELEMENT,
            beta=_ELEMENT,
            log_free={"type": "boolean"},
            realize={"type": "boolean"},
        ),
        "Compute the explicit reciprocity pairing [alpha, beta]_n as a torsion coordinate.",
    ),
    "kummer_lhs": (
        tc.tool_kummer_lhs,
        _schema(
            n={"type": "integer", "minimum": 1},
            m={"type": "integer"},
            alpha=_ELEMENT,
            exploratory={"type": "boolean"},
        ),
        "Compute (alpha, pi_n) through the norm route and compare with the formula.",
    ),
    "list_suites": (
        tv.tool_list_suites,
        {"type": "object", "properties": {}, "additionalProperties": True},
        "List the verification suites.",
    ),
    "run_suite": (
        tv.tool_run_suite,
        _schema(
            suite={"anyOf": [{"type": "string"}, {"type": "array", "items": {"type": "string"}}]},
            seed={"type": "integer"},
            samples={"type": "integer", "minimum": 1},
            report={"type": "string"},
            include_records={"type": "boolean"},
        ),
        "Run verification suites and return their summaries.",
    ),
}


def _text(payload: Any) -> List[TextContent]:
    return [TextContent.model_validate({"type": "text", "text": json.dumps(payload, ensure_ascii=False)})]


@server.list_tools()
async def _list_tools() -> List[Tool]:
    return [
        Tool(name=name, description=description, inputSchema=schema)
        for name, (_handler, schema, description) in TOOLS.items()
    ]


@server.call_tool()
async def _call_tool(name: str, arguments: Dict[str, Any]) -> List[TextContent]:
    entry = TOOLS.get(name)
    if not entry:
        return _text({"ok": False, "error": {"code": "unknown_tool", "message": name}})
    handler = entry[0]
    if isinstance(arguments, dict) and isinstance(arguments.get("values"), dict):
        arguments = arguments["values"]
    if not isinstance(arguments, dict):
        arguments = {}
    try:
        # computations are CPU-bound; keep the event loop responsive
        resp = await anyio.to_thread.run_sync(handler, arguments)
    except DrinfeldError as exc:
        resp = exc.to_response()
    except Exception as exc:
        logger.exception("%s failed", name)
        return _text({"ok": False, "error": {"code": "call_failed", "message": str(exc)}})
    if not isinstance(resp, dict) or "ok" not in resp:
        return _text({"ok": False, "error": {"code": "bad_response", "message": "invalid"}})
    if not resp["ok"]:
        return _text(resp["error"])
    return _text(resp.get("result", {}))


async def _main_async() -> int:
    async with stdio_server() as (read, write):
        init_opts = SimpleNamespace(
            server_name="drinfeld-reciprocity",
            server_version=__version__,
            website_url=None,
            icons=[],
            instructions="Compute explicit reciprocity pairings for formal Drinfeld modules and run "
            "the verification suites. Inputs and outputs are JSON.",
            capabilities={"tools": {}},
        )
        await server.run(read, write, initialization_options=init_opts)
    return 0


def main() -> int:
    return anyio.run(_main_async)


if __name__ == "__main__":
    raise SystemExit(main())
