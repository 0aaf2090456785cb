"""Precision-tracked Laurent series over a finite residue field.

A LaurentNum is Σ_{i ≥ v_min} c_i π^i known modulo π^{abs_prec}. Coefficients are residue
field elements (ints, see residue.FieldSpec). Values known exactly carry abs_prec == EXACT.
Every value keeps at most `field.working_prec` digits past its valuation, so the stored
length of any value is bounded no matter how large its exponents get.
"""

from __future__ import annotations

import random
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .errors import ConsistencyFailure, DivisionByZeroToPrecision, PrecisionExhausted
from .residue import FieldSpec

EXACT = 1 << 60


def _min_prec(a: int, b: int) -> int:
    return a if a < b else b


class LaurentNum:
    __slots__ = ("field", "v_min", "coeffs", "abs_prec")

    def __init__(
        self,
        field: FieldSpec,
        v_min: int,
        coeffs: Sequence[int],
        abs_prec: int = EXACT,
    ) -> None:
        cs = list(coeffs)
        start = 0
        while start < len(cs) and cs[start] == 0:
            start += 1
        v = v_min + start
        cs = cs[start:]
        if abs_prec < EXACT:
            room = abs_prec - v
            if room < len(cs):
                cs = cs[: max(room, 0)]
        cap = field.working_prec
        if len(cs) > cap:
            cs = cs[:cap]
            abs_prec = _min_prec(abs_prec, v + cap)
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.abs_prec = abs_prec
        if cs:
            self.v_min = v
            self.coeffs: Tuple[int, ...] = tuple(cs)
        else:
            self.v_min = abs_prec
            self.coeffs = ()

    # -- constructors ---------------------------------------------------------------------

    @classmethod
    def zero(cls, field: FieldSpec, prec: int = EXACT) -> "LaurentNum":
        return cls(field, prec, (), prec)

    @classmethod
    def constant(cls, field: FieldSpec, c: int) -> "LaurentNum":
        return cls(field, 0, (c,))

    @classmethod
    def one(cls, field: FieldSpec) -> "LaurentNum":
        return cls(field, 0, (1,))

    @classmethod
    def pi_power(cls, field: FieldSpec, k: int = 1) -> "LaurentNum":
        return cls(field, k, (1,))

    @classmethod
    def from_digits(
        cls, field: FieldSpec, digits: Sequence[int], v: int = 0, prec: int = EXACT
    ) -> "LaurentNum":
        return cls(field, v, digits, prec)

    @classmethod
    def from_base_digits(
        cls, field: FieldSpec, digits: Sequence[int], v: int = 0, prec: int = EXACT
    ) -> "LaurentNum":
        """Element of K (digits in 𝔽_q) seen inside `field`."""
        return cls(field, v, [field.embed[d] for d in digits], prec)

    @classmethod
    def random(
        cls,
        field: FieldSpec,
        rng: random.Random,
        v: int,
        prec: int,
        unit: bool = False,
        base_only: bool = False,
    ) -> "LaurentNum":
        """Random element with support in [v, prec); `unit` forces the π^v digit nonzero."""
        pool = field.base_elements if base_only else list(range(field.order))
        cs = [rng.choice(pool) for _ in range(max(prec - v, 0))]
        if unit and cs:
            while cs[0] == 0:
                cs[0] = rng.choice(pool)
        return cls(field, v, cs, prec)

    # -- inspection -----------------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        return self.abs_prec >= EXACT

    def valuation(self) -> int:
        """μ of the value; zero-to-precision values report their precision."""
        return self.v_min

    def precision(self) -> int:
        return self.abs_prec

    def is_integral(self) -> bool:
        return self.v_min >= 0

    def is_unit(self) -> bool:
        return bool(self.coeffs) and self.v_min == 0

    def coeff(self, i: int) -> int:
        if i >= self.abs_prec:
            raise PrecisionExhausted(f"coefficient of π^{i} is beyond precision {self.abs_prec}")
        j = i - self.v_min
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return 0

    def digits(self, n: int, start: int = 0) -> List[int]:
        """Residue coefficients of π^start ... π^{n-1}."""
        if n > self.abs_prec:
            raise PrecisionExhausted(f"need precision {n}, value known to {self.abs_prec}")
        if self.coeffs and self.v_min < start:
            raise ConsistencyFailure(f"value has a π^{self.v_min} term below π^{start}")
        return [self.coeff(i) for i in range(start, n)]

    def base_digits(self, n: int, start: int = 0) -> List[int]:
        """As `digits`, mapped into 𝔽_q; every digit must lie in the base field."""
        out = []
        for c in self.digits(n, start):
            b = self.field.restrict.get(c)
            if b is None:
                raise ConsistencyFailure("digit does not lie in the base residue field")
            out.append(b)
        return out

    # -- arithmetic -----------------------------------------------------------------------

    def _check(self, other: "LaurentNum") -> None:
        if other.field is not self.field and other.field != self.field:
            raise ValueError("LaurentNum operands live over different residue fields")

    def _coerce(self, other: Any) -> "LaurentNum":
        if isinstance(other, LaurentNum):
            self._check(other)
            return other
        if isinstance(other, int):
            return LaurentNum.constant(self.field, self.field.from_int(other))
        return NotImplemented

    def __add__(self, other: Any) -> "LaurentNum":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = _min_prec(self.abs_prec, other.abs_prec)
        if not self.coeffs:
            return other.truncate(prec)
        if not other.coeffs:
            return self.truncate(prec)
        lo = _min_prec(self.v_min, other.v_min)
        hi = max(self.v_min + len(self.coeffs), other.v_min + len(other.coeffs))
        hi = _min_prec(hi, prec)
        cap = self.field.working_prec
        if hi - lo > cap:
            hi = lo + cap
            prec = hi
        if hi <= lo:
            return LaurentNum.zero(self.field, prec)
        out = [0] * (hi - lo)
        for i, c in enumerate(self.coeffs):
            e = self.v_min + i - lo
            if e >= len(out):
                break
            out[e] = c
        add = self.field.add
        for i, c in enumerate(other.coeffs):
            e = other.v_min + i - lo
            if e >= len(out):
                break
            out[e] = add[out[e]][c]
        return LaurentNum(self.field, lo, out, prec)

    __radd__ = __add__

    def __neg__(self) -> "LaurentNum":
        neg = self.field.neg
        return LaurentNum(self.field, self.v_min, [neg[c] for c in self.coeffs], self.abs_prec)

    def __sub__(self, other: Any) -> "LaurentNum":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other: Any) -> "LaurentNum":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other: Any) -> "LaurentNum":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self, other
        if (not a.coeffs and a.is_exact()) or (not b.coeffs and b.is_exact()):
            return LaurentNum.zero(self.field)
        va, vb = a.v_min, b.v_min
        if a.is_exact() and b.is_exact():
            prec = EXACT
        elif a.is_exact():
            prec = b.abs_prec + va
        elif b.is_exact():
            prec = a.abs_prec + vb
        else:
            prec = _min_prec(a.abs_prec + vb, b.abs_prec + va)
        if not a.coeffs or not b.coeffs:
            return LaurentNum.zero(self.field, prec)
        v = va + vb
        n_out = len(a.coeffs) + len(b.coeffs) - 1
        if prec < EXACT:
            n_out = _min_prec(n_out, prec - v)
        n_out = _min_prec(n_out, self.field.working_prec)
        if n_out <= 0:
            return LaurentNum.zero(self.field, prec)
        if len(a.coeffs) + len(b.coeffs) - 1 > n_out:
            prec = _min_prec(prec, v + n_out)
        add, mul = self.field.add, self.field.mul
        out = [0] * n_out
        bc = b.coeffs
        lb = len(bc)
        for i, ai in enumerate(a.coeffs):
            if i >= n_out:
                break
            if not ai:
                continue
            row = mul[ai]
            for j in range(_min_prec(lb, n_out - i)):
                bj = bc[j]
                if bj:
                    out[i + j] = add[out[i + j]][row[bj]]
        return LaurentNum(self.field, v, out, prec)

    __rmul__ = __mul__

    def scale(self, c: int) -> "LaurentNum":
        """Multiply by the residue constant c."""
        if c == 0:
            return LaurentNum.zero(self.field)
        row = self.field.mul[c]
        return LaurentNum(self.field, self.v_min, [row[x] for x in self.coeffs], self.abs_prec)

    def shift(self, k: int) -> "LaurentNum":
        """Multiply by π^k."""
        prec = self.abs_prec if self.is_exact() else self.abs_prec + k
        if not self.coeffs:
            return LaurentNum.zero(self.field, prec)
        return LaurentNum(self.field, self.v_min + k, self.coeffs, prec)

    def truncate(self, prec: int) -> "LaurentNum":
        if prec >= self.abs_prec:
            return self
        return LaurentNum(self.field, self.v_min, self.coeffs, prec)

    def inverse(self, prec: Optional[int] = None) -> "LaurentNum":
        """1/self. Exact inputs are inverted to absolute precision `prec` (default working_prec)."""
        if not self.coeffs:
            raise DivisionByZeroToPrecision(f"inverting zero to precision {self.abs_prec}")
        va = self.v_min
        if self.is_exact():
            target = prec if prec is not None else self.field.working_prec
            r = target + va
        else:
            r = self.abs_prec - va
            if prec is not None:
                r = _min_prec(r, prec + va)
        if r <= 0:
            raise PrecisionExhausted("no digit of the inverse is determined")
        r = _min_prec(r, self.field.working_prec)
        add, mul, neg = self.field.add, self.field.mul, self.field.neg
        u = self.coeffs
        inv0 = self.field.inv[u[0]]
        row0 = mul[neg[inv0]]
        b = [inv0]
        for k in range(1, r):
            s = 0
            for j in range(1, _min_prec(k, len(u) - 1) + 1):
                uj = u[j]
                if uj:
                    s = add[s][mul[uj][b[k - j]]]
            b.append(row0[s])
        if self.is_exact() and len(u) == 1:
            return LaurentNum(self.field, -va, b[:1])
        return LaurentNum(self.field, -va, b, -va + r)

    def __truediv__(self, other: Any) -> "LaurentNum":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.divide(other)

    def divide(self, other: "LaurentNum", prec: Optional[int] = None) -> "LaurentNum":
        """self / other; with an exact divisor the quotient is carried to `prec`."""
        if not other.coeffs:
            raise DivisionByZeroToPrecision(f"division by zero to precision {other.abs_prec}")
        vb = other.v_min
        if not other.is_exact():
            out = self * other.inverse()
        else:
            if self.is_exact():
                target = prec if prec is not None else self.field.working_prec
            else:
                target = self.abs_prec - vb
            if not self.coeffs:
                return LaurentNum.zero(self.field, self.abs_prec - vb if not self.is_exact() else EXACT)
            if self.v_min - vb >= target:
                return LaurentNum.zero(self.field, target)
            out = self * other.inverse(prec=target - self.v_min)
        if prec is not None:
            out = out.truncate(prec)
        return out

    def __pow__(self, n: int) -> "LaurentNum":
        if n < 0:
            return self.inverse() ** (-n)
        result = LaurentNum.one(self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def frobenius(self, i: int = 1) -> "LaurentNum":
        """x^{q^i}: exponents scale by q^i and residue coefficients by the Frobenius."""
        if i == 0:
            return self
        s = self.field.q**i
        prec = self.abs_prec if self.is_exact() else self.abs_prec * s
        if not self.coeffs:
            return LaurentNum.zero(self.field, prec)
        cap = self.field.working_prec
        table = self.field.frob_table(i)
        keep = _min_prec(len(self.coeffs), (cap - 1) // s + 1)
        out = [0] * ((keep - 1) * s + 1)
        for j in range(keep):
            out[j * s] = table[self.coeffs[j]]
        if keep < len(self.coeffs):
            prec = _min_prec(prec, (self.v_min + keep) * s)
        return LaurentNum(self.field, self.v_min * s, out, prec)

    def residue_frobenius(self, i: int = 1) -> "LaurentNum":
        """Generator of Gal(H|K) applied i times: coefficientwise Frobenius, π fixed."""
        table = self.field.frob_table(i)
        return LaurentNum(self.field, self.v_min, [table[c] for c in self.coeffs], self.abs_prec)

    def equals(self, other: "LaurentNum") -> Tuple[bool, int]:
        """Equality to common precision; returns (equal, precision compared at)."""
        diff = self - other
        return diff.is_zero(), diff.abs_prec

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentNum.constant(self.field, self.field.from_int(other))
        if not isinstance(other, LaurentNum):
            return NotImplemented
        return self.equals(other)[0]

    __hash__ = None  # type: ignore[assignment]

    # -- presentation ---------------------------------------------------------------------

    def to_json(self) -> Dict[str, Any]:
        return {
            "v": self.v_min if self.coeffs else None,
            "coeffs": list(self.coeffs),
            "prec": None if self.is_exact() else self.abs_prec,
        }

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            e = self.v_min + i
            mono = "1" if e == 0 else ("π" if e == 1 else f"π^{e}")
            terms.append(mono if c == 1 else f"{c}*{mono}")
        if not self.is_exact():
            terms.append(f"O(π^{self.abs_prec})")
        return " + ".join(terms) if terms else "0"


def residue_trace_to_K(x: LaurentNum) -> LaurentNum:
    """T_{H|K} applied coefficientwise; the result lives over the base field 𝔽_q."""
    field = x.field
    return LaurentNum(field.base, x.v_min, [field.trace_to_base(c) for c in x.coeffs], x.abs_prec)


def residue_norm_to_K(x: LaurentNum) -> LaurentNum:
    """N_{H|K}(x) as the product of the Gal(H|K) conjugates of x, over the base field."""
    field = x.field
    acc = x
    for i in range(1, field.d):
        acc = acc * x.residue_frobenius(i)
    return restrict_to_base(acc)


def restrict_to_base(x: LaurentNum) -> LaurentNum:
    field = x.field
    out = []
    for c in x.coeffs:
        b = field.restrict.get(c)
        if b is None:
            raise ConsistencyFailure("value does not lie in K")
        out.append(b)
    return LaurentNum(field.base, x.v_min, out, x.abs_prec)


def embed_from_base(x: LaurentNum, field: FieldSpec) -> LaurentNum:
    """View an element of K (over field.base) inside H (over `field`)."""
    if x.field is field:
        return x
    return LaurentNum(field, x.v_min, [field.embed[c] for c in x.coeffs], x.abs_prec)


def laurent_arith(a: LaurentNum, b: LaurentNum, which: str) -> LaurentNum:
    """Dispatch for add / mul / inv / div (inv ignores b)."""
    if which == "add":
        return a + b
    if which == "mul":
        return a * b
    if which == "inv":
        return a.inverse()
    if which == "div":
        return a / b
    raise ValueError(f"unknown operation {which!r}")
