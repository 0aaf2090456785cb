"""The explicit reciprocity pairing and its independent cross-checks.

Pairing values live in the torsion module W^n and are carried as their coordinate
a ∈ 𝒪/η^n with respect to v_n: the realization is ρ_a(v_n).
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from dataclasses import field as dataclass_field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Union

from .drinfeld import DrinfeldModule, conjugate_module, torsion_action, unit_part_r
from .errors import (
    ConsistencyFailure,
    InvalidModule,
    PrecisionExhausted,
    ThresholdNotMet,
    ValuationTooSmall,
)
from .lattice import SmithForm, solve_linear, solve_mod
from .laurent import LaurentNum, restrict_to_base
from .tower import (
    TowerElem,
    TowerLevel,
    XSeries,
    different_generator,
    embed,
    evaluate_poly,
    lift_to_series,
    tower_norm,
    tower_trace,
)
from .twisted import TwistedSeries, tw_evaluate
from .types import Scalar

logger = logging.getLogger(__name__)


def _as_base(module: DrinfeldModule, a: Scalar, prec: int) -> LaurentNum:
    """a ∈ 𝒪 as a LaurentNum over K, known modulo π^prec."""
    base = module.field.base
    if isinstance(a, LaurentNum):
        x = a if a.field is base else restrict_to_base(a)
        return x.truncate(prec)
    return LaurentNum(base, 0, list(a), prec)


def in_ideal(x: TowerElem, bound: Fraction) -> bool:
    """μ(x) ≥ bound, refusing to answer when x is zero only to a lower precision."""
    if x.valuation() >= bound:
        return True
    if x.is_zero():
        raise PrecisionExhausted(
            f"element is zero to precision {x.precision()}, below {bound}"
        )
    return False


# -- δ -----------------------------------------------------------------------------------


@dataclass
class DeltaValue:
    """δ_n(β) = f'(v_n)/β, a class of 𝔭_n^{-1} modulo the different 𝒟_n."""

    level: TowerLevel
    representative: TowerElem
    modulus: TowerElem

    def congruent(self, other: Union["DeltaValue", TowerElem]) -> bool:
        rep = other.representative if isinstance(other, DeltaValue) else other
        return in_ideal(self.representative - rep, self.level.diff_val)

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.level.n,
            "representative": self.representative.to_json(),
            "valuation": str(self.representative.valuation()),
            "modulus_valuation": str(self.level.diff_val),
        }


def delta(beta: TowerElem, lift: Optional[XSeries] = None) -> DeltaValue:
    """δ_n(β) from the canonical lift of β, or from the given lift f with f(v_n) = β."""
    level = beta.level
    f = lift if lift is not None else lift_to_series(beta)
    rep = f.derivative().evaluate(level) / beta
    modulus, _ = different_generator(level)
    return DeltaValue(level, rep, modulus)


# -- pairing values ----------------------------------------------------------------------


@dataclass(frozen=True)
class PairingValue:
    """a·_ρ v_n ∈ W^n, stored as the π-digits of a modulo η^n."""

    module: DrinfeldModule = dataclass_field(compare=False, repr=False)
    n: int
    coord: Tuple[int, ...]

    @classmethod
    def from_scalar(cls, module: DrinfeldModule, n: int, a: LaurentNum) -> "PairingValue":
        N = n * module.m0
        return cls(module, n, tuple(a.digits(N)))

    @classmethod
    def zero(cls, module: DrinfeldModule, n: int) -> "PairingValue":
        return cls(module, n, (0,) * (n * module.m0))

    def scalar(self) -> LaurentNum:
        return LaurentNum(self.module.field.base, 0, self.coord, len(self.coord))

    def is_zero(self) -> bool:
        return not any(self.coord)

    def __add__(self, other: "PairingValue") -> "PairingValue":
        top = max(self.n, other.n)
        a, b = self.lift_to(top), other.lift_to(top)
        return PairingValue.from_scalar(self.module, top, a.scalar() + b.scalar())

    def __neg__(self) -> "PairingValue":
        return PairingValue.from_scalar(self.module, self.n, -self.scalar())

    def __sub__(self, other: "PairingValue") -> "PairingValue":
        return self + (-other)

    def scale(self, a: Scalar) -> "PairingValue":
        """a·_ρ of the value: coordinate multiplication in 𝒪/η^n."""
        x = _as_base(self.module, a, len(self.coord))
        return PairingValue.from_scalar(self.module, self.n, self.scalar() * x)

    def lift_to(self, m: int) -> "PairingValue":
        """The same point of W^n ⊂ W^m, written against v_m: coordinate times η^{m−n}."""
        if m == self.n:
            return self
        if m < self.n:
            raise ValueError("a pairing value only lifts to higher levels")
        x = self.scalar() * self.module.eta_power(m - self.n)
        N = m * self.module.m0
        return PairingValue(self.module, m, tuple(x.truncate(N).digits(N)))

    def same_point(self, other: "PairingValue") -> bool:
        top = max(self.n, other.n)
        return self.lift_to(top).coord == other.lift_to(top).coord

    def iota(self) -> LaurentNum:
        """a/η^n, defined modulo 𝒪."""
        return self.scalar() * self.module.eta_power(-self.n)

    def realization(self) -> TowerElem:
        level = self.module.level(self.n)
        return torsion_action(self.module, list(self.coord), level.generator(), check=False)

    def to_json(self) -> Dict[str, Any]:
        return {"n": self.n, "coord": list(self.coord)}

    def __str__(self) -> str:
        return f"[{','.join(map(str, self.coord))}]·v_{self.n}"


def pairing_rhs(
    alpha: TowerElem, beta: TowerElem, n: Optional[int] = None, use_log: bool = True
) -> PairingValue:
    """[α, β]_n = (1/η^n)·T_{L|K}(λ(α)·δ_n(β))·_ρ v_n; without the logarithm when use_log is off."""
    level = beta.level
    module = level.module
    if n is not None and n != level.n:
        raise ValueError(f"β lives at level {level.n}, not {n}")
    if alpha.level is not level:
        raise ValueError("α and β must live at the same level")
    n = level.n
    if alpha.is_zero():
        return PairingValue.zero(module, n)
    bound = module.log_bound() if use_log else module.theorem_bound(n)
    mu = alpha.valuation()
    if mu < bound:
        raise ValuationTooSmall(
            f"μ(α) = {mu} is below {bound}", {"valuation": str(mu), "bound": str(bound)}
        )
    x = module.log_at(alpha) if use_log else alpha
    d = delta(beta).representative
    s = tower_trace(x * d, "K")
    N = n * module.m0
    if s.abs_prec < 2 * N:
        raise PrecisionExhausted(
            f"trace known modulo π^{s.abs_prec}, need π^{2 * N}", {"needed": 2 * N}
        )
    a = s * module.eta_power(-n)
    if a.coeffs and a.valuation() < 0:
        raise ConsistencyFailure(
            f"T(λ(α)δ(β)) has valuation {s.valuation()} < {N}", {"valuation": s.valuation()}
        )
    return PairingValue.from_scalar(module, n, a.truncate(N))


def self_pairing(alpha: TowerElem, use_log: bool = True) -> PairingValue:
    """[α, r_n(α)]_n, which vanishes for α above the theorem bound."""
    module = alpha.level.module
    r = unit_part_r(module, alpha.level.n)
    return pairing_rhs(alpha, tw_evaluate(r, alpha), use_log=use_log)


def exchange_sides(
    c: TowerElem, b: TowerElem, use_log: bool = True
) -> Tuple[PairingValue, PairingValue]:
    """[c, 1−b] and [bc/(1−b), b^{−1}] for b ∈ 𝔭_n \\ {0}."""
    one_minus_b = 1 - b
    lhs = pairing_rhs(c, one_minus_b, use_log=use_log)
    rhs = pairing_rhs(b * c / one_minus_b, b.inverse(), use_log=use_log)
    return lhs, rhs


# -- the Galois side ---------------------------------------------------------------------


def artin_unit_on_coord(u: Scalar, value: PairingValue) -> PairingValue:
    """Φ_K(u) on W^n in coordinates: a ↦ u^{−1}·a modulo η^n."""
    module = value.module
    N = len(value.coord)
    unit = _as_base(module, u, N)
    if not unit.is_unit():
        raise ValueError("u must be a unit of 𝒪")
    return value.scale(unit.inverse(prec=N))


def artin_unit_on_torsion(u: Scalar, w: TowerElem) -> TowerElem:
    """Φ_K(u)(w) = ρ_{u^{−1}}(w) for torsion w."""
    module = w.level.module
    N = w.level.n * module.m0
    unit = _as_base(module, u, N)
    if not unit.is_unit():
        raise ValueError("u must be a unit of 𝒪")
    inv = unit.inverse(prec=N)
    return torsion_action(module, inv.digits(N), w)


@dataclass
class KummerResult:
    n: int
    m: int
    pi_n: TowerElem
    value: Optional[PairingValue]
    unit: LaurentNum
    congruence_valuation: Any
    congruence_ok: bool
    threshold_met: bool

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "pi_n": self.pi_n.to_json(),
            "value": self.value.to_json() if self.value is not None else None,
            "unit": self.unit.to_json(),
            "congruence_valuation": str(self.congruence_valuation),
            "congruence_ok": self.congruence_ok,
            "threshold_met": self.threshold_met,
        }


def kummer_lhs_prime_case(alpha: TowerElem, m: int, exploratory: bool = False) -> KummerResult:
    """(α, π_n) through the norm N_{E^m|K}(1 + b_m), b_m = ρ_{η^{m−n}}(α)/v_m.

    The Kummer value v_{2m} − ρ_{u^{−1}}(v_{2m}) has coordinate 1 − u^{−1} against v_{2m}; it
    lies in W^n exactly when that coordinate is divisible by η^{2m−n}.
    """
    level_n = alpha.level
    module = level_n.module
    n = level_n.n
    if not module.theorem_condition:
        raise InvalidModule("the norm route needs ρ_η ≡ τ^{m0} modulo 𝔭_H")
    if m <= n:
        raise ValueError("m must exceed n")
    threshold_met = m >= module.kummer_threshold(n)
    if not threshold_met and not exploratory:
        raise ThresholdNotMet(
            f"m = {m} is below {module.kummer_threshold(n)}",
            {"threshold": str(module.kummer_threshold(n))},
        )
    m0 = module.m0
    N2 = 2 * m * m0
    level_m = module.level(m)
    alpha_m = module.act(module.eta_power(m - n), embed(alpha, m))
    b = alpha_m * level_m.v_inverse()
    unit = tower_norm(b + 1, "K")
    if unit.abs_prec < N2:
        raise PrecisionExhausted(f"norm known modulo π^{unit.abs_prec}, need π^{N2}")
    uinv = unit.inverse(prec=N2)
    c = (1 - uinv).truncate(N2)
    k = (2 * m - n) * m0
    value: Optional[PairingValue] = None
    if c.valuation() >= k:
        a = c * module.eta_power(-(2 * m - n))
        value = PairingValue.from_scalar(module, n, a.truncate(n * m0))
    elif not exploratory:
        raise ConsistencyFailure(
            f"Kummer coordinate has valuation {c.valuation()} < {k}: not in W^{n}"
        )

    residual = (uinv - (1 - tower_trace(b, "K"))).truncate(N2)
    congruence_val = residual.valuation()
    pi_n = generator_norm(module, m, n)
    logger.debug("kummer n=%d m=%d: unit %r, norm congruence residual μ=%s", n, m, unit, congruence_val)
    return KummerResult(
        n=n,
        m=m,
        pi_n=pi_n,
        value=value,
        unit=unit,
        congruence_valuation=congruence_val,
        congruence_ok=congruence_val >= N2,
        threshold_met=threshold_met,
    )


# -- compatibilities ---------------------------------------------------------------------


@dataclass
class LevelShiftResult:
    upper: PairingValue
    lower: PairingValue
    agree: bool
    trace_identity: Optional[bool]
    trace_residual_valuation: Optional[Fraction]

    def to_json(self) -> Dict[str, Any]:
        return {
            "upper": self.upper.to_json(),
            "lower": self.lower.to_json(),
            "agree": self.agree,
            "trace_identity": self.trace_identity,
            "trace_residual_valuation": (
                str(self.trace_residual_valuation)
                if self.trace_residual_valuation is not None
                else None
            ),
        }


def level_shift_check(
    alpha: TowerElem, beta_upper: TowerElem, use_log: bool = True
) -> LevelShiftResult:
    """[ρ_{η^{m−n}}(α), β']_m against [α, N_{m,n}(β')]_n, plus T_{m,n}δ_m(β') ≡ η^{m−n}δ_n(β)."""
    module = alpha.level.module
    n, m = alpha.level.n, beta_upper.level.n
    if m <= n:
        raise ValueError("β' must live above α")
    alpha_m = module.act(module.eta_power(m - n), embed(alpha, m))
    upper = pairing_rhs(alpha_m, beta_upper, use_log=use_log)
    beta = tower_norm(beta_upper, n)
    lower = pairing_rhs(alpha, beta, use_log=use_log)
    agree = upper.same_point(lower)

    identity: Optional[bool] = None
    resid_val: Optional[Fraction] = None
    if module.theorem_condition:
        identity, resid_val = delta_trace_identity(beta_upper, n, beta)
    return LevelShiftResult(upper, lower, agree, identity, resid_val)


def delta_trace_identity(
    beta_upper: TowerElem, n: int, beta: Optional[TowerElem] = None
) -> Tuple[bool, Fraction]:
    """T_{m,n}δ_m(β') ≡ η^{m−n}δ_n(N_{m,n}β') modulo η^{m−n}𝒟_n; returns (holds, μ(residual))."""
    module = beta_upper.level.module
    m = beta_upper.level.n
    if beta is None:
        beta = tower_norm(beta_upper, n)
    lhs = tower_trace(delta(beta_upper).representative, n)
    rhs = delta(beta).representative * module.eta_power(m - n)
    resid = lhs - rhs
    bound = Fraction((m - n) * module.m0) + beta.level.diff_val
    return in_ideal(resid, bound), resid.valuation()


def generator_norm(module: DrinfeldModule, m: int, n: int) -> TowerElem:
    """π_n = N_{m,n}(v_m), kept on level m once computed."""
    level_m = module.level(m)
    key = ("norm_v", n)
    with level_m._lock:
        hit = level_m._cache.get(key)
    if hit is None:
        hit = tower_norm(level_m.generator(), n)
        with level_m._lock:
            level_m._cache[key] = hit
    return hit


def majoration_constant(module: DrinfeldModule, mu: Fraction, n: int) -> Fraction:
    """c(α) = j − 1/(q−1), j the band index of the roots ξ of ρ_{η^n}(X) = α.

    j = 0 above nm0 + 1/(q−1); j ∈ [1, nm0] when nm0 − j + 1/(q−1) < μ(α) ≤ nm0 − j + 1 + 1/(q−1);
    below 1/(q−1), j = nm0 + s with 1/(q^s(q−1)) < μ(α) ≤ 1/(q^{s−1}(q−1)).
    """
    q, N = module.q, n * module.m0
    sep = Fraction(1, q - 1)
    mu = Fraction(mu)
    if mu <= 0:
        raise ValuationTooSmall("α must lie in the maximal ideal")
    if mu > N + sep:
        j = 0
    elif mu > sep:
        j = N + 1 - math.ceil(mu - sep)
    else:
        s = 1
        while not (Fraction(1, q**s * (q - 1)) < mu):
            s += 1
        j = N + s
    return j - sep


@dataclass
class MajorationReport:
    constant: Fraction
    within_bounds: bool
    orbit: List[Tuple[int, Fraction, bool]]

    def to_json(self) -> Dict[str, Any]:
        return {
            "constant": str(self.constant),
            "within_bounds": self.within_bounds,
            "orbit": [{"m": m, "valuation": str(v), "ok": ok} for m, v, ok in self.orbit],
        }


def majoration_report(alpha: TowerElem, steps: int = 2) -> MajorationReport:
    """c(α) against its range and against μ(α_m) ≥ m·m0 − c(α) for m = n … n+steps."""
    level = alpha.level
    module = level.module
    n, m0 = level.n, module.m0
    c = majoration_constant(module, alpha.valuation(), n)
    sep = Fraction(1, module.q - 1)
    within = -sep <= c <= 2 * n * m0 - sep
    orbit = []
    for m in range(n, n + steps + 1):
        alpha_m = module.act(module.eta_power(m - n), embed(alpha, m))
        val = alpha_m.valuation()
        orbit.append((m, val, val >= m * m0 - c))
    return MajorationReport(c, within, orbit)


# -- Iwasawa functional ------------------------------------------------------------------


@dataclass
class IwasawaResult:
    """ψ with T(λ(α)ψ) ≡ a(α, β) modulo η^n on the lattice v^k·𝒪_n."""

    psi: TowerElem
    lattice_shift: int
    z: List[Tuple[int, ...]]
    smith: SmithForm
    residual_failures: int
    fresh_samples: int
    matches_delta: bool

    def to_json(self) -> Dict[str, Any]:
        return {
            "psi": self.psi.to_json(),
            "lattice_shift": self.lattice_shift,
            "z": [list(d) for d in self.z],
            "invariants": list(self.smith.exponents),
            "residual_failures": self.residual_failures,
            "fresh_samples": self.fresh_samples,
            "matches_delta": self.matches_delta,
        }


def _lattice_basis(level: TowerLevel, k: int) -> List[TowerElem]:
    """ω_j·v^{k+i}: an 𝒪-basis of v^k·𝒪_n, ω_j the powers of the residue generator."""
    field = level.field
    vk = level.v_power(k)
    out = []
    for i in range(level.e):
        for j in range(field.d):
            omega = LaurentNum.constant(field, field.pow(field.generator, j))
            out.append(vk * omega)
        vk = vk.times_v()
    return out


def _lattice_coords(x: TowerElem, k: int, prec: int) -> List[LaurentNum]:
    """Coordinates over 𝒪 of x ∈ v^k·𝒪_n in the basis of _lattice_basis."""
    level = x.level
    field = level.field
    base = field.base
    y = x * level.v_power(-k)
    out: List[LaurentNum] = []
    for c in y.coords:
        if c.coeffs and c.valuation() < 0:
            raise ConsistencyFailure("element does not lie in the lattice")
        comps: List[List[int]] = [[] for _ in range(field.d)]
        for i in range(prec):
            digit = c.coeff(i)
            for j, b in enumerate(field.coords_over_base(digit)):
                comps[j].append(b)
        out.extend(LaurentNum(base, 0, cs, prec) for cs in comps)
    return out


def iwasawa_functional(
    beta: TowerElem, rng: random.Random, sample_count: Optional[int] = None, fresh: int = 10
) -> IwasawaResult:
    """Solve for ψ(β) on the sublattice where the explicit formula is certified."""
    level = beta.level
    module = level.module
    n = level.n
    N = n * module.m0
    k = math.ceil(module.theorem_bound(n) * level.e)
    basis = _lattice_basis(level, k)
    r = len(basis)
    count = sample_count if sample_count is not None else 2 * r + 4
    base = module.field.base

    def sample() -> TowerElem:
        return level.v_power(k) * level.random_integral(rng)

    # the basis itself first: λ(x_a) ≡ x_a modulo π·Λ keeps the system unimodular
    alphas = list(basis) + [sample() for _ in range(max(count - r, 0))]
    rows: List[List[LaurentNum]] = []
    rhs: List[LaurentNum] = []
    for alpha in alphas:
        rows.append(_lattice_coords(module.log_at(alpha), k, N))
        rhs.append(pairing_rhs(alpha, beta).scalar())
    z, sf = solve_mod(rows, rhs, N)
    digits = [tuple(x.digits(N)) for x in z]

    # fresh α: Σ c_a z_a = T(λ(α)ψ) must reproduce the pairing coordinate
    failures = 0
    for _ in range(fresh):
        alpha = sample()
        coords = _lattice_coords(module.log_at(alpha), k, N)
        got = LaurentNum.zero(base)
        for c, za in zip(coords, z):
            got = got + c * za
        want = pairing_rhs(alpha, beta).scalar()
        if not (got.truncate(N) - want).is_zero():
            failures += 1

    # ψ = Σ z_a x_a^* with x^* the trace-dual basis, z read as exact digits
    gram = [[tower_trace(a * b, "K") for b in basis] for a in basis]
    w = solve_linear(gram, [LaurentNum(base, 0, d) for d in digits])
    psi = level.zero()
    for wb, xb in zip(w, basis):
        psi = psi + xb * wb

    d = delta(beta).representative
    matches = True
    for xa, za in zip(basis, z):
        via_delta = (tower_trace(xa * d, "K") * module.eta_power(-n)).truncate(N)
        if not (via_delta - za).is_zero():
            matches = False
            break
    return IwasawaResult(
        psi=psi,
        lattice_shift=k,
        z=digits,
        smith=sf,
        residual_failures=failures,
        fresh_samples=fresh,
        matches_delta=matches,
    )


# -- twisting the module -----------------------------------------------------------------


@dataclass
class ConjugationResult:
    twisted: PairingValue
    original: PairingValue
    agree: bool

    def to_json(self) -> Dict[str, Any]:
        return {
            "twisted": self.twisted.to_json(),
            "original": self.original.to_json(),
            "agree": self.agree,
        }


def transport(x: TowerElem, image_of_v: TowerElem) -> TowerElem:
    """Σ a_i·w^i: the image of x under the H-embedding v ↦ w."""
    acc = image_of_v.level.zero()
    for c in reversed(x.coords):
        acc = acc * image_of_v + c
    return acc


def conjugated_pairing_check(
    t: TwistedSeries,
    alpha: TowerElem,
    beta: TowerElem,
    use_log: bool = True,
    twisted_module: Optional[DrinfeldModule] = None,
) -> ConjugationResult:
    """[α', β']_{ρ'} against t^{−1}([t(α), β]_ρ) for ρ' = t^{−1}ρt.

    The towers are matched by v_n ↦ t(v'_n); coordinates against v_n and v'_n then agree.
    """
    level = alpha.level
    module = level.module
    n = level.n
    rho2 = twisted_module if twisted_module is not None else conjugate_module(module, t)
    level2 = rho2.level(n)
    t_v2 = tw_evaluate(t, level2.generator())
    check = evaluate_poly(level.g_poly(), t_v2)
    if not check.is_zero():
        raise ConsistencyFailure(f"t(v'_{n}) is not a root of g_{n}")
    twisted = pairing_rhs(transport(alpha, t_v2), transport(beta, t_v2), use_log=use_log)
    original = pairing_rhs(tw_evaluate(t, alpha), beta, use_log=use_log)
    return ConjugationResult(twisted, original, twisted.coord == original.coord)
