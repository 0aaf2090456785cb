"""Twisted power series Σ b_i τ^i with the commutation rule τx = x^q τ.

A TwistedSeries is either an additive polynomial (tau_trunc is None, finite support known
exactly) or a series known modulo τ^{T+1} (tau_trunc == T). Products carry the smaller
truncation of their operands.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Callable, List, Optional, Sequence, Tuple

from .errors import Divergent, NotInvertible, NotPreparable, PrecisionExhausted
from .laurent import EXACT, LaurentNum
from .residue import FieldSpec


def _min_trunc(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _is_exact_zero(x: LaurentNum) -> bool:
    return not x.coeffs and x.is_exact()


class TwistedSeries:
    __slots__ = ("field", "coeffs", "tau_trunc")

    def __init__(
        self,
        field: FieldSpec,
        coeffs: Sequence[LaurentNum],
        tau_trunc: Optional[int] = None,
    ) -> None:
        cs = list(coeffs)
        if tau_trunc is None:
            while cs and _is_exact_zero(cs[-1]):
                cs.pop()
        else:
            if tau_trunc < 0:
                raise PrecisionExhausted("negative τ truncation")
            cs = cs[: tau_trunc + 1]
            while len(cs) < tau_trunc + 1:
                cs.append(LaurentNum.zero(field))
        self.field = field
        self.coeffs: Tuple[LaurentNum, ...] = tuple(cs)
        self.tau_trunc = tau_trunc

    # -- constructors ---------------------------------------------------------------------

    @classmethod
    def identity(cls, field: FieldSpec) -> "TwistedSeries":
        return cls(field, [LaurentNum.one(field)])

    @classmethod
    def constant(cls, field: FieldSpec, c: LaurentNum) -> "TwistedSeries":
        return cls(field, [c])

    @classmethod
    def tau_power(cls, field: FieldSpec, k: int) -> "TwistedSeries":
        return cls(field, [LaurentNum.zero(field)] * k + [LaurentNum.one(field)])

    # -- inspection -----------------------------------------------------------------------

    def is_polynomial(self) -> bool:
        return self.tau_trunc is None

    def degree(self) -> int:
        """τ-degree of a polynomial (-1 for the zero polynomial)."""
        if self.tau_trunc is not None:
            raise PrecisionExhausted("τ-degree of a truncated series is unknown")
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> LaurentNum:
        if self.tau_trunc is not None and i > self.tau_trunc:
            raise PrecisionExhausted(f"τ^{i} is beyond truncation τ^{self.tau_trunc}")
        if i < len(self.coeffs):
            return self.coeffs[i]
        return LaurentNum.zero(self.field)

    def D(self) -> LaurentNum:
        """Constant term; a ring homomorphism to 𝒪_H."""
        return self.coeff(0)

    def ord_tau(self) -> Optional[int]:
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                return i
        return None

    def is_integral(self) -> bool:
        return all(c.is_zero() or c.is_integral() for c in self.coeffs)

    def reduction(self) -> List[int]:
        """Coefficients modulo 𝔭_H as residue field elements."""
        out = []
        for c in self.coeffs:
            if c.coeffs and c.valuation() < 0:
                raise NotPreparable("reduction of a non-integral series")
            out.append(c.coeff(0))
        return out

    def reduced_ord_tau(self) -> Optional[int]:
        for i, c in enumerate(self.reduction()):
            if c:
                return i
        return None

    def min_valuation(self) -> int:
        vals = [c.valuation() for c in self.coeffs if c.coeffs]
        return min(vals) if vals else 0

    # -- arithmetic -----------------------------------------------------------------------

    def __add__(self, other: "TwistedSeries") -> "TwistedSeries":
        T = _min_trunc(self.tau_trunc, other.tau_trunc)
        n = max(len(self.coeffs), len(other.coeffs))
        if T is not None:
            n = T + 1
        return TwistedSeries(self.field, [self.coeff(i) + other.coeff(i) for i in range(n)], T)

    def __neg__(self) -> "TwistedSeries":
        return TwistedSeries(self.field, [-c for c in self.coeffs], self.tau_trunc)

    def __sub__(self, other: "TwistedSeries") -> "TwistedSeries":
        return self + (-other)

    def __mul__(self, other: Any) -> "TwistedSeries":
        if isinstance(other, TwistedSeries):
            return tw_mul(self, other)
        return NotImplemented

    def scale(self, a: LaurentNum) -> "TwistedSeries":
        """a·f, with a on the left."""
        return TwistedSeries(self.field, [a * c for c in self.coeffs], self.tau_trunc)

    def right_scale(self, a: LaurentNum) -> "TwistedSeries":
        """f·a = Σ b_i a^{q^i} τ^i."""
        return TwistedSeries(
            self.field, [c * a.frobenius(i) for i, c in enumerate(self.coeffs)], self.tau_trunc
        )

    def truncate_tau(self, T: int) -> "TwistedSeries":
        if self.tau_trunc is not None and self.tau_trunc <= T:
            return self
        if self.tau_trunc is None and len(self.coeffs) <= T + 1:
            return self
        return TwistedSeries(self.field, self.coeffs, T)

    def equals(self, other: "TwistedSeries") -> Tuple[bool, int]:
        """Coefficientwise equality to common precision; returns (equal, min precision)."""
        diff = self - other
        prec = EXACT
        ok = True
        for c in diff.coeffs:
            ok = ok and c.is_zero()
            prec = min(prec, c.abs_prec)
        return ok, prec

    def to_xpoly(self) -> List[LaurentNum]:
        """Dense X-polynomial Σ b_i X^{q^i}."""
        if self.tau_trunc is not None:
            raise PrecisionExhausted("only additive polynomials convert to X-polynomials")
        if not self.coeffs:
            return [LaurentNum.zero(self.field)]
        q = self.field.q
        top = q ** (len(self.coeffs) - 1)
        out = [LaurentNum.zero(self.field)] * (top + 1)
        for i, c in enumerate(self.coeffs):
            out[q**i] = c
        return out

    def to_json(self) -> dict:
        return {
            "coeffs": [c.to_json() for c in self.coeffs],
            "tau_trunc": self.tau_trunc,
        }

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero() and c.is_exact():
                continue
            mono = "" if i == 0 else ("τ" if i == 1 else f"τ^{i}")
            terms.append(f"({c}){mono}")
        if self.tau_trunc is not None:
            terms.append(f"O(τ^{self.tau_trunc + 1})")
        return " + ".join(terms) if terms else "0"


def tw_mul(f: TwistedSeries, g: TwistedSeries) -> TwistedSeries:
    """(fg)_n = Σ_{i+j=n} f_i · g_j^{q^i}."""
    if f.field != g.field:
        raise ValueError("twisted series over different fields")
    T = _min_trunc(f.tau_trunc, g.tau_trunc)
    if T is None:
        top = len(f.coeffs) + len(g.coeffs) - 2
    else:
        top = T
    zero = LaurentNum.zero(f.field)
    out: List[LaurentNum] = []
    for n in range(top + 1):
        acc = zero
        for i in range(min(n, len(f.coeffs) - 1) + 1):
            j = n - i
            if j >= len(g.coeffs):
                continue
            fi, gj = f.coeffs[i], g.coeffs[j]
            if _is_exact_zero(fi) or _is_exact_zero(gj):
                continue
            acc = acc + fi * gj.frobenius(i)
        out.append(acc)
    return TwistedSeries(f.field, out, T)


def tw_invert(f: TwistedSeries, mode: str = "unit", trunc: Optional[int] = None) -> TwistedSeries:
    """Two-sided inverse of f in the twisted ring, solved degree by degree.

    `unit` requires ord_τ(f) = 0 with D(f) a unit of 𝒪_H; `compositional` only D(f) ≠ 0.
    Polynomials are inverted modulo τ^{trunc+1}.
    """
    if mode not in ("unit", "compositional"):
        raise ValueError(f"unknown inversion mode {mode!r}")
    f0 = f.D()
    if f0.is_zero():
        raise NotInvertible("constant term is zero to precision", {"mode": mode})
    if mode == "unit" and not f0.is_unit():
        raise NotInvertible("constant term is not a unit of 𝒪_H", {"mode": mode})
    T = f.tau_trunc if f.tau_trunc is not None else trunc
    if T is None:
        if len(f.coeffs) == 1:
            return TwistedSeries(f.field, [f0.inverse()])
        raise NotInvertible("inverting a polynomial needs a τ truncation")
    inv0 = f0.inverse()
    neg_inv0 = -inv0
    g: List[LaurentNum] = [inv0]
    for n in range(1, T + 1):
        s = LaurentNum.zero(f.field)
        for i in range(1, min(n, len(f.coeffs) - 1) + 1):
            fi = f.coeffs[i]
            if _is_exact_zero(fi):
                continue
            s = s + fi * g[n - i].frobenius(i)
        g.append(neg_inv0 * s)
    return TwistedSeries(f.field, g, T)


def _high_part(f: TwistedSeries, d: int) -> TwistedSeries:
    T = None if f.tau_trunc is None else f.tau_trunc - d
    return TwistedSeries(f.field, f.coeffs[d:], T)


def _mul_into(w: TwistedSeries, low: TwistedSeries, top: int) -> List[LaurentNum]:
    """Coefficients 0..top of w·low for a polynomial `low` with coefficients in 𝔭_H.

    Coefficients of w past its truncation only enter through low_b^{q^a} with a beyond the
    truncation, so those coefficients are capped at precision q^{T+1}·μ(low).
    """
    field = w.field
    T = w.tau_trunc
    cap = EXACT
    if T is not None:
        floor = max(low.min_valuation(), 1)
        cap = min(EXACT, field.q ** min(T + 1, 60) * floor)
    zero = LaurentNum.zero(field)
    out = []
    for n in range(top + 1):
        acc = zero
        for b, lb in enumerate(low.coeffs):
            a = n - b
            if a < 0 or _is_exact_zero(lb):
                continue
            if T is not None and a > T:
                continue
            wa = w.coeffs[a] if a < len(w.coeffs) else zero
            if _is_exact_zero(wa):
                continue
            acc = acc + wa * lb.frobenius(a)
        if T is not None and n > T:
            acc = acc.truncate(cap)
        out.append(acc)
    return out


def weierstrass_prep(
    f: TwistedSeries,
    target_prec: Optional[int] = None,
    trunc: Optional[int] = None,
) -> Tuple[TwistedSeries, TwistedSeries]:
    """Factor f = u·P with u a unit and P monic of τ-degree ord_τ(f̄), lower terms in 𝔭_H.

    w = u^{-1} is the fixed point of w ↦ (1 − H(w·f_low))·f_high^{-1}, where f_low holds the
    terms below τ^d and H drops the first d coefficients.
    """
    field = f.field
    if not f.is_integral():
        raise NotPreparable("series has a non-integral coefficient")
    d = f.reduced_ord_tau()
    if d is None:
        raise NotPreparable("reduction modulo 𝔭_H vanishes to precision")
    target = target_prec if target_prec is not None else field.working_prec
    T = f.tau_trunc if f.tau_trunc is not None else trunc
    if T is None:
        T = max(len(f.coeffs) - 1, 1)
    low = TwistedSeries(field, f.coeffs[:d])
    high = _high_part(f, d)
    high_inv = tw_invert(high, "unit", trunc=T)
    one = TwistedSeries.identity(field)

    w = high_inv
    for _ in range(target + 2):
        prod = _mul_into(w, low, (w.tau_trunc or 0) + d)
        shifted = TwistedSeries(field, prod[d:], w.tau_trunc)
        nxt = tw_mul(one - shifted, high_inv)
        same, _prec = nxt.equals(w)
        w = nxt
        if same:
            break

    lower = _mul_into(w, low, d - 1) if d else []
    for i, c in enumerate(lower):
        if not c.is_zero() and c.valuation() < 1:
            raise NotPreparable(f"coefficient of τ^{i} of the distinguished part is not in 𝔭_H")
    P = TwistedSeries(field, list(lower) + [LaurentNum.one(field)])
    u = tw_invert(w, "unit")
    return u, P


def tw_evaluate(
    f: TwistedSeries,
    x: Any,
    tail_bound: Optional[Any] = None,
    coeff_floor: Optional[Callable[[int], Any]] = None,
) -> Any:
    """Σ b_i x^{q^i} for a LaurentNum or TowerElem x.

    For a truncated series, term i has valuation at least coeff_floor(i) + q^i·μ(x) (the
    floor defaults to the least coefficient valuation). Summing stops once that bound reaches
    `tail_bound` (default: the precision of x, capped at the working precision) and is no
    longer decreasing.
    """
    q = f.field.q
    if f.tau_trunc is None:
        acc = None
        xp = x
        for i, c in enumerate(f.coeffs):
            if i:
                xp = xp.frobenius()
            if _is_exact_zero(c):
                continue
            term = c * xp
            acc = term if acc is None else acc + term
        return acc if acc is not None else LaurentNum.zero(f.field) * x

    if x.is_zero():
        return f.D() * x
    mu = Fraction(x.valuation())
    if mu <= 0:
        raise Divergent("evaluation point is not topologically nilpotent", {"valuation": str(mu)})
    if tail_bound is None:
        tail_bound = min(Fraction(x.precision()), Fraction(f.field.working_prec))
    target = Fraction(tail_bound)
    if coeff_floor is None:
        c0 = min(f.min_valuation(), 0)
        coeff_floor = lambda i: c0  # noqa: E731

    def bound(i: int) -> Fraction:
        return Fraction(coeff_floor(i)) + q**i * mu

    acc = None
    xp = x
    stop = None
    for i, c in enumerate(f.coeffs):
        if i:
            if bound(i) >= target and bound(i + 1) >= bound(i):
                stop = bound(i)
                break
            xp = xp.frobenius()
        if _is_exact_zero(c):
            continue
        term = c * xp
        acc = term if acc is None else acc + term
    if stop is None:
        stop = bound(f.tau_trunc + 1)
        if stop < target:
            raise Divergent(
                "series truncation too short for this evaluation point",
                {"tail_bound": str(stop), "target": str(target)},
            )
    if acc is None:
        acc = LaurentNum.zero(f.field) * x
    if isinstance(acc, LaurentNum):
        return acc.truncate(math.ceil(stop))
    return acc.truncate(stop)
