"""Deterministic Python API over drinfeld_reciprocity.tools.*

These wrappers call the underlying tool_* functions and return plain dicts.
They raise ValueError on failures instead of returning {ok:false} envelopes.
"""

from __future__ import annotations

from typing import Any, Dict, List, Optional, Sequence, Union

from .tools.compute import (
    tool_compute_delta,
    tool_compute_pairing,
    tool_kummer_lhs,
    tool_show_tower,
    tool_validate_module,
)
from .tools.verify import tool_list_suites, tool_run_suite


def _unwrap(resp: Dict[str, Any]) -> Dict[str, Any]:
    if not isinstance(resp, dict) or "ok" not in resp:
        raise ValueError("invalid response")
    if not resp["ok"]:
        err = resp.get("error")
        raise ValueError(str(err))
    return resp.get("result", {})


def _config_params(config: str, inline: bool) -> Dict[str, Any]:
    return {"config_text": config} if inline else {"config": config}


# Module and tower
def validate_module(config: str, *, inline: bool = False) -> Dict[str, Any]:
    return _unwrap(tool_validate_module(_config_params(config, inline)))


def show_tower(config: str, n: int, *, inline: bool = False) -> Dict[str, Any]:
    return _unwrap(tool_show_tower({**_config_params(config, inline), "n": n}))


# Pairing
def compute_delta(config: str, n: int, beta: str, *, inline: bool = False) -> Dict[str, Any]:
    return _unwrap(tool_compute_delta({**_config_params(config, inline), "n": n, "beta": beta}))


def compute_pairing(
    config: str,
    n: int,
    alpha: str,
    beta: str,
    *,
    log_free: bool = False,
    realize: bool = False,
    inline: bool = False,
) -> Dict[str, Any]:
    return _unwrap(
        tool_compute_pairing(
            {
                **_config_params(config, inline),
                "n": n,
                "alpha": alpha,
                "beta": beta,
                "log_free": log_free,
                "realize": realize,
            }
        )
    )


def kummer_lhs(
    config: str,
    n: int,
    alpha: str,
    m: Optional[int] = None,
    *,
    exploratory: bool = False,
    inline: bool = False,
) -> Dict[str, Any]:
    params: Dict[str, Any] = {
        **_config_params(config, inline),
        "n": n,
        "alpha": alpha,
        "exploratory": exploratory,
    }
    if m is not None:
        params["m"] = m
    return _unwrap(tool_kummer_lhs(params))


# Verification
def list_suites() -> List[Dict[str, str]]:
    return _unwrap(tool_list_suites({}))["suites"]


def run_suite(
    config: str,
    suite: Union[str, Sequence[str], None] = None,
    *,
    seed: Optional[int] = None,
    samples: Optional[int] = None,
    report: Optional[str] = None,
    include_records: bool = False,
    inline: bool = False,
) -> Dict[str, Any]:
    names = [suite] if isinstance(suite, str) else list(suite or [])
    return _unwrap(
        tool_run_suite(
            {
                **_config_params(config, inline),
                "suite": names,
                "seed": seed,
                "samples": samples,
                "report": report,
                "include_records": include_records,
            }
        )
    )
