from __future__ import annotations

import re
from fractions import Fraction
from typing import Any, Dict, List, Optional

from ..config import RunConfig, parse_config, parse_config_text
from ..errors import DrinfeldError, SchemaError, error_response
from ..laurent import LaurentNum
from ..reciprocity import delta, kummer_lhs_prime_case, pairing_rhs
from ..server import CONTEXTS
from ..tower import TowerElem, TowerLevel, different_generator, tower_norm
from ..types import ResponseEnvelope

_COORD = re.compile(r"^\s*([^@]*?)\s*(?:@\s*(-?\d+))?\s*$")


def _ok(result: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return ResponseEnvelope(ok=True, result=result).to_dict()


def _jsonify(value: Any) -> Any:
    """Convert library values to JSON-safe structures.

    - Scalars pass through
    - Fractions become "a/b" strings
    - Values with to_json() use it
    - Sequences and dicts convert element-wise
    """
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, Fraction):
        return str(value)
    to_json = getattr(value, "to_json", None)
    if callable(to_json):
        return _jsonify(to_json())
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    return str(value)


def load_config(params: Dict[str, Any]) -> RunConfig:
    """Config from params["config"] (a path) or params["config_text"] (key=value text)."""
    text = params.get("config_text")
    if isinstance(text, str) and text.strip():
        return parse_config_text(text)
    path = params.get("config")
    if not isinstance(path, str) or not path.strip():
        raise SchemaError(["'config' (path) or 'config_text' is required"])
    return parse_config(path.strip())


def _int_param(params: Dict[str, Any], name: str, default: Optional[int] = None) -> int:
    raw = params.get(name, default)
    if raw is None:
        raise ValueError(f"'{name}' is required")
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise ValueError(f"'{name}' must be an integer, got {raw!r}") from None


def parse_element(text: str, level: TowerLevel) -> TowerElem:
    """Element from coordinate text: `;` between coordinates against 1, v_n, v_n², …,
    each a comma list of π-digits from π^0 upward with an optional `@k` shift by π^k."""
    if not isinstance(text, str) or not text.strip():
        raise ValueError("element coordinates are required")
    field = level.field
    parts = text.split(";")
    if len(parts) > level.e:
        raise ValueError(f"{len(parts)} coordinates for a level of degree {level.e}")
    coords: List[LaurentNum] = []
    for part in parts:
        m = _COORD.match(part)
        if m is None:
            raise ValueError(f"cannot parse coordinate {part!r}")
        body, shift = m.group(1), int(m.group(2) or 0)
        digits = [int(d.strip(), 0) for d in body.split(",") if d.strip()]
        for d in digits:
            if not 0 <= d < field.order:
                raise ValueError(f"digit {d} is not an element of GF({field.order})")
        coords.append(LaurentNum(field, shift, digits))
    return TowerElem(level, coords)


def _context(params: Dict[str, Any]):
    config = load_config(params)
    return config, CONTEXTS.get_or_build(config)


def tool_validate_module(params: Dict[str, Any]) -> Dict[str, Any]:
    try:
        config, module = _context(params)
    except DrinfeldError as exc:
        return exc.to_response()
    result = module.describe()
    result.update(
        {
            "config_digest": config.digest,
            "theorem_bounds": {str(n): module.theorem_bound(n) for n in range(1, config.levels + 1)},
            "log_bound": module.log_bound(),
        }
    )
    return _ok(_jsonify(result))


def tool_show_tower(params: Dict[str, Any]) -> Dict[str, Any]:
    try:
        n = _int_param(params, "n")
        if n < 1:
            return error_response("invalid_params", "'n' must be at least 1")
        _, module = _context(params)
        level = module.level(n)
        _, diff_val = different_generator(level)
        result = level.to_json()
        result["different_generator_valuation"] = diff_val
        result["generator_norm_to_H"] = tower_norm(level.generator(), "H")
        result["theorem_bound"] = module.theorem_bound(n)
        result["vanishing_bound"] = module.vanishing_bound(n)
    except ValueError as exc:
        return error_response("invalid_params", str(exc))
    except DrinfeldError as exc:
        return exc.to_response()
    return _ok(_jsonify(result))


def tool_compute_delta(params: Dict[str, Any]) -> Dict[str, Any]:
    try:
        n = _int_param(params, "n")
        _, module = _context(params)
        level = module.level(n)
        beta = parse_element(params.get("beta"), level)
        value = delta(beta)
    except ValueError as exc:
        return error_response("invalid_params", str(exc))
    except DrinfeldError as exc:
        return exc.to_response()
    return _ok(_jsonify(value))


def tool_compute_pairing(params: Dict[str, Any]) -> Dict[str, Any]:
    """[α, β]_n by the explicit formula; `log_free` drops the logarithm."""
    try:
        n = _int_param(params, "n")
        _, module = _context(params)
        level = module.level(n)
        alpha = parse_element(params.get("alpha"), level)
        beta = parse_element(params.get("beta"), level)
        use_log = not bool(params.get("log_free", False))
        value = pairing_rhs(alpha, beta, use_log=use_log)
        result: Dict[str, Any] = {
            "n": n,
            "value": value,
            "display": str(value),
            "iota": value.iota(),
            "alpha_valuation": alpha.valuation(),
            "log_free": not use_log,
        }
        if params.get("realize"):
            result["realization"] = value.realization()
    except ValueError as exc:
        return error_response("invalid_params", str(exc))
    except DrinfeldError as exc:
        return exc.to_response()
    return _ok(_jsonify(result))


def tool_kummer_lhs(params: Dict[str, Any]) -> Dict[str, Any]:
    """(α, π_n) through the norm route, alongside the formula's [α, π_n]_n."""
    try:
        n = _int_param(params, "n")
        _, module = _context(params)
        m = _int_param(params, "m", module.kummer_level(n))
        level = module.level(n)
        alpha = parse_element(params.get("alpha"), level)
        exploratory = bool(params.get("exploratory", False))
        kummer = kummer_lhs_prime_case(alpha, m, exploratory=exploratory)
        formula = pairing_rhs(alpha, kummer.pi_n)
        result = kummer.to_json()
        result["formula"] = formula
        result["agree"] = kummer.value is not None and kummer.value.same_point(formula)
    except ValueError as exc:
        return error_response("invalid_params", str(exc))
    except DrinfeldError as exc:
        return exc.to_response()
    return _ok(_jsonify(result))
