"""Formal Drinfeld modules of stable height-1 reduction.

A module is determined by ρ_π ∈ 𝒪_H{{τ}}. Scalars act by ρ_c = c for c ∈ 𝔽_q and a general
a = Σ c_i π^i acts through the digit series ρ_a = Σ c_i ρ_π^i. Powers of ρ_π, their
Weierstrass factorizations, the logarithm and exponential, and the torsion tower levels are
memoized on the module with build-once semantics.
"""

from __future__ import annotations

import logging
import math
import threading
from fractions import Fraction
from itertools import product
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple

from .errors import (
    AmbiguousDigit,
    ConsistencyFailure,
    InvalidModule,
    NotSolvable,
    NotTorsion,
)
from .laurent import EXACT, LaurentNum, restrict_to_base
from .residue import FieldSpec
from .twisted import TwistedSeries, tw_evaluate, tw_invert, tw_mul, weierstrass_prep
from .types import Scalar

if TYPE_CHECKING:  # pragma: no cover
    from .tower import TowerElem, TowerLevel, XSeries

logger = logging.getLogger(__name__)


def digits_of(a: Scalar, n: int) -> List[int]:
    """First n π-digits of a ∈ 𝒪 as 𝔽_q elements (base-field encodings)."""
    if isinstance(a, LaurentNum):
        if a.field.d == 1:
            return a.digits(n)
        return a.base_digits(n)
    ds = [int(c) for c in a][:n]
    return ds + [0] * (n - len(ds))


def _digit_count(a: Scalar, cap: int) -> int:
    if isinstance(a, LaurentNum):
        if a.is_exact():
            return a.v_min + len(a.coeffs) if a.coeffs else 0
        return min(a.abs_prec, cap)
    return min(len(a), cap)


class DrinfeldModule:
    """ρ with ρ_π given, η = u·π^{m0}, τ-series truncated at `tau_trunc`."""

    def __init__(
        self,
        rho_pi: TwistedSeries,
        m0: int = 1,
        unit_u: Optional[LaurentNum] = None,
        tau_trunc: int = 16,
    ) -> None:
        self.field: FieldSpec = rho_pi.field
        self.q = self.field.q
        self.m0 = m0
        self.tau_trunc = tau_trunc
        self.rho_pi = rho_pi.truncate_tau(tau_trunc)
        self.unit_u = unit_u if unit_u is not None else LaurentNum.one(self.field)
        self.pi = LaurentNum.pi_power(self.field)
        self.ht_reduction: Optional[int] = None
        self.theorem_condition = False
        self._lock = threading.RLock()
        self._pi_powers: Dict[int, TwistedSeries] = {0: TwistedSeries.identity(self.field)}
        self._prepared: Dict[int, Tuple[TwistedSeries, TwistedSeries]] = {}
        self._series: Dict[Any, TwistedSeries] = {}
        self._levels: Dict[int, "TowerLevel"] = {}

    # -- η and bounds ---------------------------------------------------------------------

    @property
    def eta(self) -> LaurentNum:
        return self.unit_u.shift(self.m0)

    def eta_power(self, k: int) -> LaurentNum:
        """η^k over K."""
        return restrict_to_base(self.unit_u**k).shift(k * self.m0)

    def theorem_bound(self, n: int) -> Fraction:
        q, N = self.q, n * self.m0
        return Fraction(N, q) + Fraction(1, q - 1) + Fraction(1, q**N * (q - 1))

    def log_bound(self) -> Fraction:
        return Fraction(2, self.q - 1)

    def vanishing_bound(self, n: int) -> Fraction:
        return Fraction(n * self.m0) + Fraction(1, self.q - 1)

    def kummer_threshold(self, n: int) -> Fraction:
        q = self.q
        return Fraction(q, q - 1) * (2 * n + Fraction(1, 2 * self.m0))

    def kummer_level(self, n: int) -> int:
        return math.ceil(self.kummer_threshold(n))

    # -- series ---------------------------------------------------------------------------

    def _cap(self, f: TwistedSeries) -> TwistedSeries:
        return f.truncate_tau(self.tau_trunc)

    def rho_pi_power(self, j: int) -> TwistedSeries:
        with self._lock:
            top = max(self._pi_powers)
            while top < j:
                self._pi_powers[top + 1] = self._cap(tw_mul(self.rho_pi, self._pi_powers[top]))
                top += 1
            return self._pi_powers[j]

    def prepared(self, j: int) -> Tuple[TwistedSeries, TwistedSeries]:
        """(U, P) with ρ_{π^j} = U·P and P the distinguished root polynomial P_(j)."""
        with self._lock:
            hit = self._prepared.get(j)
            if hit is None:
                if j == 0:
                    one = TwistedSeries.identity(self.field)
                    hit = (one, one)
                else:
                    hit = weierstrass_prep(self.rho_pi_power(j), trunc=self.tau_trunc)
                    if hit[1].degree() != j:
                        raise ConsistencyFailure(
                            f"root polynomial of ρ_(π^{j}) has τ-degree {hit[1].degree()}"
                        )
                logger.debug("prepared ρ_(π^%d)", j)
                self._prepared[j] = hit
            return hit

    def root_polynomial(self, j: int) -> TwistedSeries:
        return self.prepared(j)[1]

    def root_xpoly(self, j: int) -> List[LaurentNum]:
        return self.root_polynomial(j).to_xpoly()

    def rho_eta(self) -> TwistedSeries:
        return self.rho_of(self.eta)

    def rho_of(self, a: Scalar, prec: Optional[int] = None) -> TwistedSeries:
        return rho_of(self, a, prec)

    def apply_rho_pi(self, x: Any) -> Any:
        return tw_evaluate(self.rho_pi, x)

    def act(self, a: Scalar, x: Any) -> Any:
        """ρ_a(x) = Σ c_i ρ_π^i(x) for topologically nilpotent x."""
        n = _digit_count(a, self.field.working_prec)
        digits = digits_of(a, n)
        acc = None
        y = x
        for i, c in enumerate(digits):
            if i:
                y = self.apply_rho_pi(y)
                if y.is_zero() and y.precision() >= EXACT:
                    break
            if c:
                term = y.scale(self.field.embed[c])
                acc = term if acc is None else acc + term
        if acc is None:
            acc = x.scale(0)
        if isinstance(a, LaurentNum) and not a.is_exact() and n == a.abs_prec:
            tail = self.apply_rho_pi(y)
            if not tail.is_zero():
                acc = acc.truncate(tail.valuation())
        return acc

    def logarithm(self) -> TwistedSeries:
        return logarithm(self)

    def exponential(self) -> TwistedSeries:
        return exponential(self)

    def log_at(self, x: Any) -> Any:
        return tw_evaluate(self.logarithm(), x, coeff_floor=lambda i: -i)

    def exp_at(self, x: Any) -> Any:
        q = self.q
        return tw_evaluate(
            self.exponential(), x, coeff_floor=lambda i: -Fraction(q**i - 1, q - 1)
        )

    # -- tower ----------------------------------------------------------------------------

    def level(self, n: int) -> "TowerLevel":
        with self._lock:
            lv = self._levels.get(n)
            if lv is None:
                # Lazy import: tower depends on this module.
                from .tower import build_level

                lv = build_level(self, n)
                self._levels[n] = lv
            else:
                logger.debug("level %d cache hit", n)
            return lv

    def describe(self) -> Dict[str, Any]:
        return {
            "p": self.field.p,
            "q": self.q,
            "d_h": self.field.d,
            "m0": self.m0,
            "unit_u": self.unit_u.to_json(),
            "rho_pi": self.rho_pi.to_json(),
            "tau_trunc": self.tau_trunc,
            "ht_reduction": self.ht_reduction,
            "theorem_condition": self.theorem_condition,
        }

    def __repr__(self) -> str:
        return f"DrinfeldModule(rho_pi={self.rho_pi!r}, m0={self.m0}, u={self.unit_u!r})"


def _reduction_height(rho_pi: TwistedSeries) -> Optional[int]:
    red = rho_pi.reduction()
    return next((i for i, c in enumerate(red) if i and c), None)


def module_violations(
    rho_pi: TwistedSeries, m0: int = 1, unit_u: Optional[LaurentNum] = None
) -> List[str]:
    """Every defining condition the description fails, in checking order."""
    field = rho_pi.field
    out: List[str] = []
    if m0 < 1:
        out.append("m0 must be positive")
    elif field.d % m0:
        out.append(f"m0 = {m0} does not divide [H:K] = {field.d}")
    if unit_u is not None:
        if unit_u.field != field:
            out.append("unit u lives over a different field")
        elif not unit_u.is_unit():
            out.append("u is not a unit of 𝒪")
        else:
            try:
                restrict_to_base(unit_u)
            except ConsistencyFailure:
                out.append("u does not lie in K")
    pi = LaurentNum.pi_power(field)
    if not (rho_pi.D() - pi).is_zero():
        out.append(f"D(ρ_π) ≠ π: D = {rho_pi.D()!r}")
    if all(c.is_zero() for c in rho_pi.coeffs[1:]):
        out.append("ρ_π has no τ term, so ρ(𝒪) lies in the constants")
    elif not rho_pi.is_integral():
        out.append("stable reduction: ρ_π has a non-integral coefficient")
    else:
        ht = _reduction_height(rho_pi)
        if ht is None:
            out.append("stable reduction: ρ_π reduces to a constant")
        elif ht != 1:
            out.append(f"height of the reduction is {ht}, expected 1")
    return out


def validate_module(
    rho_pi: TwistedSeries,
    m0: int = 1,
    unit_u: Optional[LaurentNum] = None,
    tau_trunc: int = 16,
) -> DrinfeldModule:
    """Check the module conditions and derive the reduction flags."""
    violations = module_violations(rho_pi, m0, unit_u)
    if violations:
        raise InvalidModule(violations[0], {"violations": violations})

    module = DrinfeldModule(rho_pi, m0, unit_u, tau_trunc)
    module.ht_reduction = _reduction_height(rho_pi)
    eta_red = module.rho_eta().reduction()
    module.theorem_condition = all(
        (c == 1) if i == m0 else (c == 0) for i, c in enumerate(eta_red)
    )
    logger.debug("validated %r (theorem condition %s)", module, module.theorem_condition)
    return module


def rho_of(module: DrinfeldModule, a: Scalar, prec: Optional[int] = None) -> TwistedSeries:
    """ρ_a = Σ c_i ρ_π^i for a = Σ c_i π^i, c_i ∈ 𝔽_q."""
    field = module.field
    cap = prec if prec is not None else field.working_prec
    n = _digit_count(a, cap)
    digits = digits_of(a, n)
    acc = TwistedSeries(field, [])
    for i, c in enumerate(digits):
        if c:
            term = module.rho_pi_power(i).scale(LaurentNum.constant(field, field.embed[c]))
            acc = acc + term
    if isinstance(a, LaurentNum) and not a.is_exact():
        # Unknown digits from π^n on contribute ρ_π^n-multiples: [τ^j]ρ_π^i has μ ≥ i − j.
        T = module.tau_trunc
        acc = TwistedSeries(
            field,
            [acc.coeff(j).truncate(max(n - j, 0)) for j in range(T + 1)],
            T,
        )
    return module._cap(acc)


def logarithm(module: DrinfeldModule) -> TwistedSeries:
    """λ = Σ c_i τ^i with λ·ρ_π = π·λ, c_0 = 1."""
    with module._lock:
        hit = module._series.get("log")
        if hit is not None:
            return hit
        field, q, T = module.field, module.q, module.tau_trunc
        R = field.working_prec
        pi = module.pi
        b = [module.rho_pi.coeff(j) for j in range(T + 1)]
        c: List[LaurentNum] = [LaurentNum.one(field)]
        for n in range(1, T + 1):
            s = LaurentNum.zero(field)
            for i in range(n):
                s = s + c[i] * b[n - i].frobenius(i)
            den = pi - pi ** (q**n)
            cn = s.divide(den, prec=-n + R)
            if cn.coeffs and cn.valuation() < -n:
                raise ConsistencyFailure(
                    f"logarithm coefficient c_{n} has valuation {cn.valuation()} < {-n}"
                )
            c.append(cn)
        lam = TwistedSeries(field, c, T)
        module._series["log"] = lam
        return lam


def exponential(module: DrinfeldModule) -> TwistedSeries:
    """e = Σ d_i τ^i with ρ_π·e = e·π, d_0 = 1."""
    with module._lock:
        hit = module._series.get("exp")
        if hit is not None:
            return hit
        field, q, T = module.field, module.q, module.tau_trunc
        R = field.working_prec
        pi = module.pi
        b = [module.rho_pi.coeff(j) for j in range(T + 1)]
        d: List[LaurentNum] = [LaurentNum.one(field)]
        for n in range(1, T + 1):
            floor = -((q**n - 1) // (q - 1))
            s = LaurentNum.zero(field)
            for j in range(1, n + 1):
                s = s + b[j] * d[n - j].frobenius(j)
            den = pi ** (q**n) - pi
            dn = s.divide(den, prec=floor + R)
            if dn.coeffs and dn.valuation() < floor:
                raise ConsistencyFailure(
                    f"exponential coefficient d_{n} has valuation {dn.valuation()} < {floor}"
                )
            d.append(dn)
        exp = TwistedSeries(field, d, T)
        module._series["exp"] = exp
        return exp


# -- torsion -----------------------------------------------------------------------------


def is_torsion(module: DrinfeldModule, w: "TowerElem") -> bool:
    y = w
    for _ in range(w.level.n * module.m0):
        if y.is_zero():
            return True
        y = module.apply_rho_pi(y)
    return y.is_zero()


def torsion_action(
    module: DrinfeldModule, a: Scalar, w: "TowerElem", check: bool = True
) -> "TowerElem":
    """ρ_a(w) for w ∈ W^n; only the digits of a below π^{n·m0} matter."""
    N = w.level.n * module.m0
    if check and not is_torsion(module, w):
        raise NotTorsion(f"element is not killed by ρ_(π^{N})")
    digits = digits_of(a, N)
    acc = w.level.zero()
    y = w
    for i, c in enumerate(digits):
        if i:
            y = module.apply_rho_pi(y)
        if c:
            acc = acc + y.scale(module.field.embed[c])
    return acc


def torsion_dlog(module: DrinfeldModule, w: "TowerElem") -> List[int]:
    """π-digits of the a ∈ 𝒪/π^{n·m0} with ρ_a(v_n) = w."""
    level = w.level
    N = level.n * module.m0
    if not is_torsion(module, w):
        raise NotTorsion(f"element is not killed by ρ_(π^{N})")
    orbit = [level.generator()]
    for _ in range(1, N):
        orbit.append(module.apply_rho_pi(orbit[-1]))
    z = orbit[-1]
    sep = Fraction(1, module.q - 1)
    field = module.field
    digits: List[int] = []
    cur = w
    for i in range(N):
        y = cur
        for _ in range(N - 1 - i):
            y = module.apply_rho_pi(y)
        matches = []
        for c in field.base.base_elements:
            diff = y - z.scale(field.embed[c])
            # zero-to-precision values report their precision as valuation
            if diff.valuation() > sep:
                matches.append(c)
        if len(matches) != 1:
            raise AmbiguousDigit(
                f"digit {i} matched {len(matches)} candidates",
                {"digit": i, "matches": matches},
            )
        c = matches[0]
        digits.append(c)
        if c:
            cur = cur - orbit[i].scale(field.embed[c])
    return digits


def unit_part_r(module: DrinfeldModule, n: int) -> TwistedSeries:
    """r_n with P_(n·m0) = r_n·ρ_{η^n}: the inverse of ρ_{u^n}·U where ρ_{π^{n m0}} = U·P."""
    with module._lock:
        key = ("r", n)
        hit = module._series.get(key)
        if hit is not None:
            return hit
        N = n * module.m0
        U, P = module.prepared(N)
        rho_un = rho_of(module, module.unit_u**n)
        r = tw_invert(module._cap(tw_mul(rho_un, U)), "unit", trunc=module.tau_trunc)
        if not r.is_integral() or not r.D().is_unit():
            raise ConsistencyFailure("r_n is not a unit of 𝒪_H{{τ}}")
        rho_eta_n = module._cap(tw_mul(rho_un, module.rho_pi_power(N)))
        same, prec = module._cap(tw_mul(r, rho_eta_n)).equals(P.truncate_tau(module.tau_trunc))
        if not same:
            raise ConsistencyFailure("P_(n m0) ≠ r_n·ρ_(η^n)", {"precision": prec})
        module._series[key] = r
        return r


def conjugate_module(module: DrinfeldModule, t: TwistedSeries) -> DrinfeldModule:
    """ρ' with ρ'_π = t^{-1}·ρ_π·t."""
    tinv = tw_invert(t, "unit", trunc=module.tau_trunc)
    rho2 = tw_mul(tw_mul(tinv, module.rho_pi), t)
    return validate_module(
        rho2.truncate_tau(module.tau_trunc), module.m0, module.unit_u, module.tau_trunc
    )


# -- Coleman norm -------------------------------------------------------------------------


def coleman_norm(module: DrinfeldModule, f: "XSeries", order: Optional[int] = None) -> "XSeries":
    """Ñ(f) with Ñ(f)∘ρ_η = ∏_{w ∈ W¹} f(X + w), for a Laurent polynomial f = X^j·U(X).

    The product is a polynomial Σ G_k P_(m0)^k in P_(m0) = r_1∘ρ_η, so
    Ñ(f) = r_1^j·Σ G_k r_1^k with r_1 read as an additive series in X. When r_1 has τ terms
    the result is known modulo X^order (twice the working precision by default).
    """
    from .tower import TowerElem, XSeries, additive_series, poly_divmod, poly_mul_generic, taylor_shift

    if not module.theorem_condition:
        raise InvalidModule("Coleman norm requires ρ_η ≡ τ^{m0} modulo 𝔭_H")
    field = module.field
    level = module.level(1)
    v = level.generator()
    roots = [
        torsion_action(module, list(ds), v, check=False)
        for ds in product(range(field.base.order), repeat=module.m0)
    ]

    unit = [TowerElem(level, [x]) for x in f.coeffs]
    F = [level.one()]
    for w in roots:
        F = poly_mul_generic(F, taylor_shift(unit, w), level.zero())

    flat: List[LaurentNum] = []
    for k, coeff in enumerate(F):
        for i, x in enumerate(coeff.coords[1:], start=1):
            if not x.is_zero():
                raise NotSolvable(f"coefficient of X^{k} is not in H", {"coordinate": i})
        flat.append(coeff.coords[0])

    Q = module.root_xpoly(module.m0)
    G: List[LaurentNum] = []
    rest = flat
    while len(rest) > 1 or (rest and not rest[0].is_zero()):
        quo, rem = poly_divmod(rest, Q)
        for k, x in enumerate(rem[1:], start=1):
            if not x.is_zero():
                raise NotSolvable(f"P_(m0)-adic digit has an X^{k} term")
        G.append(rem[0] if rem else LaurentNum.zero(field))
        rest = quo
        if not quo:
            break

    cut = order if order is not None else 2 * field.working_prec
    r1 = unit_part_r(module, 1)
    if all(c.is_zero() for c in r1.coeffs[1:]):
        r = XSeries(field, 1, [r1.D()])
    else:
        r = additive_series(r1, cut)
        logger.debug("Coleman norm through r_1 with τ terms, X-order %s", r.order)

    acc = XSeries(field, 0, [])
    for g in reversed(G):
        acc = acc * r + XSeries.constant(field, g)
    if f.shift >= 0:
        return acc * r**f.shift
    return acc * r.inverse(cut) ** (-f.shift)
