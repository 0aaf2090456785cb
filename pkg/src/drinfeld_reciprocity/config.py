"""Run configuration: a key=value file describing the field, the module and the run.

    field.p = 2
    module.rho_pi[0][1] = 1     # π in the τ^0 coefficient
    module.rho_pi[1][0] = 1     # 1 in the τ^1 coefficient
    run.levels = 3

Residue coordinates are either the integer encoding of an element (base-p digits of its
polynomial representative) or a bracketed list of its 𝔽_p coordinates, `[c0,c1,...]`.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence, Tuple

from sympy import isprime

from .errors import InvalidModule, SchemaError

if TYPE_CHECKING:  # pragma: no cover
    from .drinfeld import DrinfeldModule
    from .laurent import LaurentNum
    from .twisted import TwistedSeries

PREC_FLOOR = 8
TAU_FLOOR = 4

_RHO_KEY = re.compile(r"^module\.rho_pi\[(\d+)\]\[(\d+)\]$")
_TOKEN = re.compile(r"\[[^\]]*\]|[^,\s][^,]*")

_SCALAR_KEYS = {
    "field.p": "p",
    "field.k": "k",
    "field.d_h": "d_h",
    "module.m0": "m0",
    "prec.pi": "pi_prec",
    "prec.tau": "tau_trunc",
    "run.levels": "levels",
    "run.seed": "seed",
    "run.samples": "samples",
}
_LIST_KEYS = {"module.unit_u": "unit_u", "run.exploratory_m": "exploratory_m"}


@dataclass
class RunConfig:
    p: int
    rho_pi: Dict[int, Dict[int, int]]
    k: int = 1
    d_h: int = 1
    m0: int = 1
    unit_u: List[int] = field(default_factory=lambda: [1])
    pi_prec: int = 32
    tau_trunc: int = 16
    levels: int = 3
    seed: int = 0
    samples: int = 20
    exploratory_m: List[int] = field(default_factory=list)
    suites: List[str] = field(default_factory=list)
    source: Optional[str] = None

    @property
    def q(self) -> int:
        return self.p**self.k

    def module_values(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "k": self.k,
            "d_h": self.d_h,
            "m0": self.m0,
            "unit_u": list(self.unit_u),
            "rho_pi": {str(i): {str(j): c for j, c in sorted(row.items())} for i, row in sorted(self.rho_pi.items())},
            "pi_prec": self.pi_prec,
            "tau_trunc": self.tau_trunc,
        }

    def to_json(self) -> Dict[str, Any]:
        out = self.module_values()
        out.update(
            {
                "levels": self.levels,
                "seed": self.seed,
                "samples": self.samples,
                "exploratory_m": list(self.exploratory_m),
            }
        )
        return out

    @property
    def digest(self) -> str:
        return hashlib.sha256(canonical_json(self.to_json()).encode("utf-8")).hexdigest()

    @property
    def module_digest(self) -> str:
        """Digest of the values that determine the module and its tower."""
        return hashlib.sha256(canonical_json(self.module_values()).encode("utf-8")).hexdigest()

    def with_overrides(
        self,
        seed: Optional[int] = None,
        samples: Optional[int] = None,
        suites: Optional[Sequence[str]] = None,
    ) -> "RunConfig":
        changes: Dict[str, Any] = {}
        if seed is not None:
            changes["seed"] = seed
        if samples is not None:
            changes["samples"] = samples
        if suites:
            changes["suites"] = list(suites)
        return replace(self, **changes) if changes else self


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _parse_int(text: str) -> int:
    return int(text.strip(), 0)


def _parse_residue(text: str, p: Optional[int]) -> int:
    """Residue coordinate: integer encoding, or [c0,c1,...] over 𝔽_p."""
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise ValueError(f"unterminated coordinate list {text!r}")
        if p is None:
            raise ValueError("coordinate lists need field.p")
        coords = [_parse_int(c) for c in text[1:-1].split(",") if c.strip()]
        if any(not 0 <= c < p for c in coords):
            raise ValueError(f"coordinates {coords} are not in [0, {p})")
        return sum(c * p**i for i, c in enumerate(coords))
    return _parse_int(text)


def _split_list(text: str) -> List[str]:
    return [t.strip() for t in _TOKEN.findall(text) if t.strip()]


def parse_config_text(text: str, source: str = "<inline>") -> RunConfig:
    """Parse key=value text; every violation is collected before raising SchemaError."""
    violations: List[str] = []
    raw: Dict[str, Tuple[int, str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            violations.append(f"line {lineno}: expected key = value")
            continue
        key, value = (s.strip() for s in stripped.split("=", 1))
        if key in raw:
            violations.append(f"line {lineno}: duplicate key {key}")
            continue
        raw[key] = (lineno, value)

    values: Dict[str, Any] = {}
    for key, attr in _SCALAR_KEYS.items():
        if key in raw:
            lineno, value = raw[key]
            try:
                values[attr] = _parse_int(value)
            except ValueError:
                violations.append(f"line {lineno}: {key} must be an integer, got {value!r}")

    p = values.get("p")
    if p is None:
        if "field.p" not in raw:
            violations.append("missing field.p")
    elif not isprime(p):
        violations.append(f"field.p = {p} is not prime")
        p = None

    for key, attr in _LIST_KEYS.items():
        if key in raw:
            lineno, value = raw[key]
            try:
                if attr == "unit_u":
                    values[attr] = [_parse_residue(t, p) for t in _split_list(value)]
                else:
                    values[attr] = [_parse_int(t) for t in _split_list(value)]
            except ValueError as exc:
                violations.append(f"line {lineno}: {key}: {exc}")

    rho: Dict[int, Dict[int, int]] = {}
    for key, (lineno, value) in raw.items():
        if key in _SCALAR_KEYS or key in _LIST_KEYS:
            continue
        m = _RHO_KEY.match(key)
        if m is None:
            violations.append(f"line {lineno}: unknown key {key}")
            continue
        i, j = int(m.group(1)), int(m.group(2))
        try:
            rho.setdefault(i, {})[j] = _parse_residue(value, p)
        except ValueError as exc:
            violations.append(f"line {lineno}: {key}: {exc}")
    if not rho:
        violations.append("missing module.rho_pi")

    k = values.get("k", 1)
    d_h = values.get("d_h", 1)
    m0 = values.get("m0", 1)
    if k < 1:
        violations.append("field.k must be positive")
    if d_h < 1:
        violations.append("field.d_h must be positive")
    if m0 < 1:
        violations.append("module.m0 must be positive")
    elif d_h >= 1 and d_h % m0:
        violations.append(f"module.m0 = {m0} does not divide field.d_h = {d_h}")
    if values.get("pi_prec", PREC_FLOOR) < PREC_FLOOR:
        violations.append(f"prec.pi must be at least {PREC_FLOOR}")
    if values.get("tau_trunc", TAU_FLOOR) < TAU_FLOOR:
        violations.append(f"prec.tau must be at least {TAU_FLOOR}")
    if values.get("levels", 1) < 1:
        violations.append("run.levels must be positive")
    if values.get("samples", 1) < 1:
        violations.append("run.samples must be positive")

    if p is not None and k >= 1 and d_h >= 1:
        order_h = p ** (k * d_h)
        for i, row in rho.items():
            for j, c in row.items():
                if not 0 <= c < order_h:
                    violations.append(f"module.rho_pi[{i}][{j}] = {c} is not in GF({order_h})")
        for c in values.get("unit_u", []):
            if not 0 <= c < p**k:
                violations.append(f"module.unit_u digit {c} is not in GF({p**k})")

    if violations:
        raise SchemaError(violations)
    config = RunConfig(rho_pi=rho, source=source, **values)
    violations = module_problems(config)
    if violations:
        raise SchemaError(violations)
    return config


def parse_config(path: str) -> RunConfig:
    p = Path(path).expanduser()
    if not p.is_file():
        raise SchemaError([f"config file does not exist: {path}"])
    return parse_config_text(p.read_text(encoding="utf-8"), source=str(p))


def _module_inputs(config: RunConfig) -> Tuple["TwistedSeries", "LaurentNum"]:
    from .laurent import LaurentNum
    from .residue import field_spec
    from .twisted import TwistedSeries

    fs = field_spec(config.p, config.k, config.d_h, config.pi_prec)
    top = max(config.rho_pi)
    coeffs = []
    for i in range(top + 1):
        row = config.rho_pi.get(i, {})
        digits = [row.get(j, 0) for j in range(max(row, default=-1) + 1)]
        coeffs.append(LaurentNum(fs, 0, digits))
    rho_pi = TwistedSeries(fs, coeffs)
    return rho_pi, LaurentNum.from_base_digits(fs, config.unit_u)


def module_problems(config: RunConfig) -> List[str]:
    """Field and module conditions the config fails, as config violations."""
    from .drinfeld import module_violations

    try:
        rho_pi, unit = _module_inputs(config)
    except InvalidModule as exc:
        return [f"field: {exc}"]
    return [f"module: {v}" for v in module_violations(rho_pi, config.m0, unit)]


def build_module(config: RunConfig) -> "DrinfeldModule":
    """Residue field, ρ_π and u from the config, validated."""
    from .drinfeld import validate_module

    rho_pi, unit = _module_inputs(config)
    return validate_module(rho_pi, config.m0, unit, config.tau_trunc)
