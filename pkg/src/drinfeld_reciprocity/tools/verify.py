from __future__ import annotations

from typing import Any, Dict, List

from ..errors import DrinfeldError, error_response
from ..server import CONTEXTS
from ..suites import list_suites, run_suites, write_report
from .compute import _ok, load_config


def tool_list_suites(_: Dict[str, Any]) -> Dict[str, Any]:
    return _ok({"suites": list_suites()})


def tool_run_suite(params: Dict[str, Any]) -> Dict[str, Any]:
    """Run one or more suites; `suite` is a name or a list of names, all suites when omitted."""
    names = params.get("suite") or params.get("suites") or []
    if isinstance(names, str):
        names = [names]
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        return error_response("invalid_params", "'suite' must be a name or a list of names")
    try:
        seed = params.get("seed")
        samples = params.get("samples")
        config = load_config(params).with_overrides(
            seed=int(seed) if seed is not None else None,
            samples=int(samples) if samples is not None else None,
            suites=names,
        )
        module = CONTEXTS.get_or_build(config)
        reports = run_suites(config, module=module)
        report_path = params.get("report")
        if isinstance(report_path, str) and report_path.strip():
            write_report(reports, report_path.strip())
    except (TypeError, ValueError) as exc:
        return error_response("invalid_params", str(exc))
    except DrinfeldError as exc:
        return exc.to_response()

    result: Dict[str, Any] = {
        "pass": all(r.passed for r in reports),
        "summaries": [r.summary() for r in reports],
    }
    if params.get("include_records"):
        records: List[Dict[str, Any]] = []
        for r in reports:
            records.extend(r.records())
        result["records"] = records
    return _ok(result)
