from __future__ import annotations

import json
import logging
import sys
import threading
from typing import Any, Callable, Dict

from .config import RunConfig, build_module
from .drinfeld import DrinfeldModule
from .errors import DrinfeldError, error_response

logger = logging.getLogger(__name__)


class ContextRegistry:
    """Validated modules keyed by the digest of the values that determine them.

    A module is built at most once per digest; its series and tower caches are then shared by
    every later request with the same field and ρ_π.
    """

    def __init__(self) -> None:
        self._modules: Dict[str, DrinfeldModule] = {}
        self._lock = threading.Lock()

    def get_or_build(self, config: RunConfig) -> DrinfeldModule:
        key = config.module_digest
        with self._lock:
            module = self._modules.get(key)
            if module is None:
                logger.debug("building module for %s", key[:12])
                module = build_module(config)
                self._modules[key] = module
            return module

    def clear(self) -> None:
        with self._lock:
            self._modules.clear()

    def __len__(self) -> int:
        return len(self._modules)


CONTEXTS = ContextRegistry()


def _register_tools() -> Dict[str, Callable[[Dict[str, Any]], Dict[str, Any]]]:
    from .tools.compute import (
        tool_compute_delta,
        tool_compute_pairing,
        tool_kummer_lhs,
        tool_show_tower,
        tool_validate_module,
    )
    from .tools.verify import tool_list_suites, tool_run_suite

    return {
        "validate_module": tool_validate_module,
        "show_tower": tool_show_tower,
        "compute_delta": tool_compute_delta,
        "compute_pairing": tool_compute_pairing,
        "kummer_lhs": tool_kummer_lhs,
        "list_suites": tool_list_suites,
        "run_suite": tool_run_suite,
    }


def serve() -> int:
    """JSON-lines loop over stdin/stdout.

    Request format:
        {"method": "compute_pairing", "params": { ... }}

    Response format: ResponseEnvelope dict.
    """
    tools = _register_tools()

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
            method = req.get("method")
            params = req.get("params") or {}
        except Exception as exc:
            sys.stdout.write(json.dumps(error_response("bad_request", f"Invalid JSON: {exc}")) + "\n")
            sys.stdout.flush()
            continue

        handler = tools.get(method)
        if handler is None:
            sys.stdout.write(json.dumps(error_response("unknown_method", f"Unknown method: {method}")) + "\n")
            sys.stdout.flush()
            continue

        try:
            resp = handler(params)
        except DrinfeldError as exc:
            resp = exc.to_response()
        except Exception as exc:
            logger.exception("%s failed", method)
            resp = error_response("internal_error", str(exc))

        sys.stdout.write(json.dumps(resp, ensure_ascii=False) + "\n")
        sys.stdout.flush()

    return 0
