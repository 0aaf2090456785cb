"""The torsion tower E^n = H[X]/(g_n) and arithmetic in the power basis of v_n.

g_n is the exact quotient P_(n·m0) / P_(n·m0 − 1) of root polynomials. Level n sits inside
level m ≥ n through v_n ↦ ρ_{η^{m−n}}(v_m); one step down the tower the minimal polynomial
of v_{k+1} over E^k is P_(m0)(X) − r_1(v_k).
"""

from __future__ import annotations

import logging
import math
import random
import threading
from fractions import Fraction
from itertools import product
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence, Tuple, Union

from .errors import (
    ConsistencyFailure,
    NonIntegralUnitPart,
    NotEisenstein,
    NotSolvable,
    PrecisionExhausted,
    ZeroToPrecision,
)
from .lattice import determinant, solve_linear
from .laurent import (
    EXACT,
    LaurentNum,
    embed_from_base,
    residue_norm_to_K,
    residue_trace_to_K,
)
from .twisted import TwistedSeries, tw_evaluate
from .types import Target

if TYPE_CHECKING:  # pragma: no cover
    from .drinfeld import DrinfeldModule

logger = logging.getLogger(__name__)


def _exact_zero(x: LaurentNum) -> bool:
    return not x.coeffs and x.is_exact()


# -- dense polynomials over H --------------------------------------------------------------


def poly_divmod(
    a: Sequence[LaurentNum], b: Sequence[LaurentNum]
) -> Tuple[List[LaurentNum], List[LaurentNum]]:
    """Division by a monic polynomial; coefficient lists run from X^0 upward."""
    db = len(b) - 1
    rem = list(a)
    field = b[-1].field
    zero = LaurentNum.zero(field)
    if len(rem) <= db:
        return [], rem + [zero] * (db - len(rem))
    quo = [zero] * (len(rem) - db)
    for k in range(len(rem) - 1, db - 1, -1):
        c = rem[k]
        if _exact_zero(c):
            continue
        quo[k - db] = c
        for i in range(db):
            if not _exact_zero(b[i]):
                rem[k - db + i] = rem[k - db + i] - c * b[i]
        rem[k] = zero
    return quo, rem[:db]


def poly_mul_generic(a: Sequence[Any], b: Sequence[Any], zero: Any) -> List[Any]:
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def taylor_shift(coeffs: Sequence["TowerElem"], w: "TowerElem") -> List["TowerElem"]:
    """Coefficients of U(X + w) from those of U(X)."""
    out: List[TowerElem] = []
    for c in reversed(coeffs):
        # out := out·(X + w) + c
        shifted = [w.level.zero()] + out
        for k in range(len(out)):
            shifted[k] = shifted[k] + w * out[k]
        if shifted:
            shifted[0] = shifted[0] + c
        out = shifted
    return out


# -- levels -------------------------------------------------------------------------------


class TowerLevel:
    """Level n of the torsion tower: E^n = H(v_n) with v_n a root of g_n."""

    def __init__(self, module: "DrinfeldModule", n: int, g: Sequence[LaurentNum]) -> None:
        self.module = module
        self.n = n
        self.field = module.field
        self.q = module.q
        self.e = len(g)
        self.g: Tuple[LaurentNum, ...] = tuple(g)
        self.v_val = Fraction(1, self.e)
        self.diff_val = Fraction(n * module.m0) - Fraction(1, self.q - 1)
        self._lock = threading.RLock()
        self._images: Dict[int, TowerElem] = {}
        self._cache: Dict[str, Any] = {}

    # elements

    def zero(self) -> "TowerElem":
        return TowerElem(self, [])

    def one(self) -> "TowerElem":
        return TowerElem(self, [LaurentNum.one(self.field)])

    def constant(self, c: LaurentNum) -> "TowerElem":
        return TowerElem(self, [embed_from_base(c, self.field)])

    def generator(self) -> "TowerElem":
        if self.e == 1:
            return TowerElem(self, [-self.g[0]])
        return TowerElem(self, [LaurentNum.zero(self.field), LaurentNum.one(self.field)])

    def v_inverse(self) -> "TowerElem":
        """v^{-1} = −(v^{e−1} + g_{e−1}v^{e−2} + … + g_1)/g_0."""
        with self._lock:
            hit = self._cache.get("v_inv")
            if hit is None:
                inv_g0 = -self.g[0].inverse()
                coords = [self.g[i + 1] * inv_g0 for i in range(self.e - 1)] + [inv_g0]
                hit = TowerElem(self, coords)
                self._cache["v_inv"] = hit
            return hit

    def v_power(self, k: int) -> "TowerElem":
        acc = self.one()
        if k >= 0:
            for _ in range(k):
                acc = acc.times_v()
            return acc
        inv = self.v_inverse()
        for _ in range(-k):
            acc = acc * inv
        return acc

    def random_integral(
        self, rng: random.Random, prec: Optional[int] = None, unit: bool = False
    ) -> "TowerElem":
        prec = prec if prec is not None else self.field.working_prec
        coords = [
            LaurentNum.random(self.field, rng, 0, prec, unit=(unit and i == 0))
            for i in range(self.e)
        ]
        return TowerElem(self, coords)

    def random_element(self, rng: random.Random, k: int, prec: Optional[int] = None) -> "TowerElem":
        """v^k times a random unit: an element of valuation exactly k/e."""
        return self.v_power(k) * self.random_integral(rng, prec, unit=True)

    # structure

    def g_poly(self) -> List[LaurentNum]:
        return list(self.g) + [LaurentNum.one(self.field)]

    def power_sums(self) -> List[LaurentNum]:
        """s_k = Σ v^k over the conjugates of v, for k < e (Newton identities)."""
        with self._lock:
            hit = self._cache.get("power_sums")
            if hit is None:
                hit = newton_power_sums(self.g_poly(), self.e)
                self._cache["power_sums"] = hit
            return hit

    def image_in(self, m: int) -> "TowerElem":
        """v_n as an element of level m: ρ_{η^{m−n}}(v_m)."""
        if m == self.n:
            return self.generator()
        with self._lock:
            hit = self._images.get(m)
            if hit is not None:
                return hit
        from .drinfeld import torsion_action

        upper = self.module.level(m)
        y = upper.generator()
        for _ in range(m - self.n):
            y = torsion_action(self.module, self.module.eta, y, check=False)
        check = evaluate_poly(self.g_poly(), y)
        if not check.is_zero():
            raise ConsistencyFailure(
                f"ρ_η-image of v_{m} is not a root of g_{self.n}",
                {"valuation": str(check.valuation())},
            )
        with self._lock:
            self._images[m] = y
        return y

    def t_elem(self) -> "TowerElem":
        """r_1(v_n): the value of P_(m0) at v_{n+1}."""
        with self._lock:
            hit = self._cache.get("t")
            if hit is None:
                from .drinfeld import unit_part_r

                hit = tw_evaluate(unit_part_r(self.module, 1), self.generator())
                self._cache["t"] = hit
            return hit

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "degree": self.e,
            "g": [c.to_json() for c in self.g_poly()],
            "v_valuation": str(self.v_val),
            "different_valuation": str(self.diff_val),
        }

    def __repr__(self) -> str:
        return f"TowerLevel(n={self.n}, e={self.e})"


def newton_power_sums(poly: Sequence[LaurentNum], count: int) -> List[LaurentNum]:
    """Power sums s_0..s_{count−1} of the roots of a monic polynomial of degree d ≥ count−1."""
    d = len(poly) - 1
    field = poly[-1].field
    c = [poly[d - k] if k <= d else LaurentNum.zero(field) for k in range(d + 1)]
    s = [LaurentNum.constant(field, field.from_int(d))]
    for k in range(1, count):
        acc = c[k] * k if k <= d else LaurentNum.zero(field)
        for i in range(1, k):
            if i <= d and not _exact_zero(c[i]):
                acc = acc + c[i] * s[k - i]
        s.append(-acc)
    return s


def evaluate_poly(poly: Sequence[LaurentNum], x: "TowerElem") -> "TowerElem":
    acc = x.level.zero()
    for c in reversed(poly):
        acc = acc * x + c
    return acc


def build_level(module: "DrinfeldModule", n: int) -> TowerLevel:
    """g_n = P_(n·m0) / P_(n·m0 − 1), checked to be Eisenstein."""
    if n < 1:
        raise ValueError("tower levels start at n = 1")
    N = n * module.m0
    hi = module.root_xpoly(N)
    lo = module.root_xpoly(N - 1) if N > 1 else [LaurentNum.zero(module.field), LaurentNum.one(module.field)]
    quo, rem = poly_divmod(hi, lo)
    for i, c in enumerate(rem):
        if not c.is_zero():
            raise NotEisenstein(f"P_({N}) is not divisible by P_({N - 1})", {"term": i})
    q = module.q
    e = q ** (N - 1) * (q - 1)
    if len(quo) != e + 1:
        raise NotEisenstein(f"g_{n} has degree {len(quo) - 1}, expected {e}")
    if not (quo[-1] - LaurentNum.one(module.field)).is_zero():
        raise NotEisenstein(f"g_{n} is not monic")
    for i, c in enumerate(quo[:-1]):
        if not c.is_zero() and c.valuation() < 1:
            raise NotEisenstein(f"coefficient of X^{i} in g_{n} is not in 𝔭_H")
    if quo[0].is_zero() or quo[0].valuation() != 1:
        raise NotEisenstein(f"constant term of g_{n} is not a prime of H")
    logger.debug("built level %d (degree %d over H)", n, e)
    return TowerLevel(module, n, quo[:-1])


# -- elements -----------------------------------------------------------------------------


class TowerElem:
    """Σ a_i v^i with a_i ∈ H, i < e."""

    __slots__ = ("level", "coords")

    def __init__(self, level: TowerLevel, coords: Sequence[LaurentNum]) -> None:
        cs = list(coords)
        if len(cs) > level.e:
            raise ValueError(f"{len(cs)} coordinates for a degree-{level.e} level")
        cs += [LaurentNum.zero(level.field)] * (level.e - len(cs))
        self.level = level
        self.coords: Tuple[LaurentNum, ...] = tuple(cs)

    def _coerce(self, other: Any) -> Any:
        if isinstance(other, TowerElem):
            if other.level is not self.level:
                raise ValueError(f"elements of levels {self.level.n} and {other.level.n}")
            return other
        if isinstance(other, LaurentNum):
            return self.level.constant(other)
        if isinstance(other, int):
            f = self.level.field
            return self.level.constant(LaurentNum.constant(f, f.from_int(other)))
        return NotImplemented

    # ring operations

    def __add__(self, other: Any) -> "TowerElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TowerElem(self.level, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self) -> "TowerElem":
        return TowerElem(self.level, [-a for a in self.coords])

    def __sub__(self, other: Any) -> "TowerElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other: Any) -> "TowerElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other: Any) -> "TowerElem":
        if isinstance(other, LaurentNum):
            c = embed_from_base(other, self.level.field)
            return TowerElem(self.level, [c * a for a in self.coords])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._mul(other)

    __rmul__ = __mul__

    def _mul(self, other: "TowerElem") -> "TowerElem":
        e, g = self.level.e, self.level.g
        field = self.level.field
        zero = LaurentNum.zero(field)
        prod = [zero] * (2 * e - 1)
        for i, a in enumerate(self.coords):
            if _exact_zero(a):
                continue
            for j, b in enumerate(other.coords):
                if not _exact_zero(b):
                    prod[i + j] = prod[i + j] + a * b
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[k]
            if _exact_zero(c):
                continue
            for i in range(e):
                if not _exact_zero(g[i]):
                    prod[k - e + i] = prod[k - e + i] - c * g[i]
        return TowerElem(self.level, prod[:e])

    def scale(self, c: int) -> "TowerElem":
        """Multiply by the residue constant c."""
        return TowerElem(self.level, [a.scale(c) for a in self.coords])

    def times_v(self) -> "TowerElem":
        e, g = self.level.e, self.level.g
        if e == 1:
            return self * self.level.generator()
        top = self.coords[-1]
        out = [LaurentNum.zero(self.level.field)] + list(self.coords[:-1])
        if not _exact_zero(top):
            out = [out[i] - top * g[i] for i in range(e)]
        return TowerElem(self.level, out)

    def multiplication_matrix(self) -> List[List[LaurentNum]]:
        """Rows i, columns j: coordinate i of self·v^j."""
        cols = [self]
        for _ in range(1, self.level.e):
            cols.append(cols[-1].times_v())
        return [[cols[j].coords[i] for j in range(self.level.e)] for i in range(self.level.e)]

    def inverse(self) -> "TowerElem":
        if self.is_zero():
            raise ZeroToPrecision("inverting an element that is zero to precision")
        if self.level.e == 1:
            return TowerElem(self.level, [self.coords[0].inverse()])
        field = self.level.field
        rhs = [LaurentNum.one(field)] + [LaurentNum.zero(field)] * (self.level.e - 1)
        return TowerElem(self.level, solve_linear(self.multiplication_matrix(), rhs))

    def __truediv__(self, other: Any) -> "TowerElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, k: int) -> "TowerElem":
        if k < 0:
            return self.inverse() ** (-k)
        result = self.level.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def frobenius(self) -> "TowerElem":
        """x^q."""
        return self ** self.level.q

    # valuation and precision

    def precision(self) -> Fraction:
        e = self.level.e
        return min(Fraction(c.abs_prec) + Fraction(i, e) for i, c in enumerate(self.coords))

    def valuation(self) -> Fraction:
        """μ(x); zero-to-precision elements report their precision."""
        e = self.level.e
        prec = self.precision()
        vals = [
            Fraction(c.valuation()) + Fraction(i, e) for i, c in enumerate(self.coords) if c.coeffs
        ]
        if not vals or min(vals) >= prec:
            return prec
        return min(vals)

    def is_zero(self) -> bool:
        e = self.level.e
        vals = [
            Fraction(c.valuation()) + Fraction(i, e) for i, c in enumerate(self.coords) if c.coeffs
        ]
        return not vals or min(vals) >= self.precision()

    def truncate(self, prec: Any) -> "TowerElem":
        prec = Fraction(prec)
        if prec >= EXACT:
            return self
        e = self.level.e
        return TowerElem(
            self.level,
            [c.truncate(math.ceil(prec - Fraction(i, e))) for i, c in enumerate(self.coords)],
        )

    def equals(self, other: "TowerElem") -> Tuple[bool, Fraction]:
        diff = self - other
        return diff.is_zero(), diff.precision()

    def to_json(self) -> Dict[str, Any]:
        prec = self.precision()
        return {
            "level": self.level.n,
            "coords": [c.to_json() for c in self.coords],
            "prec": None if prec >= EXACT else str(prec),
        }

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coords):
            if c.is_zero() and c.is_exact():
                continue
            mono = "" if i == 0 else ("v" if i == 1 else f"v^{i}")
            terms.append(f"({c}){mono}" if mono else f"({c})")
        return " + ".join(terms) if terms else "0"


def tower_valuation(x: TowerElem) -> Fraction:
    if x.is_zero():
        raise ZeroToPrecision(f"element is zero to precision {x.precision()}")
    return x.valuation()


# -- trace, norm, embeddings ---------------------------------------------------------------


def trace_to_H(x: TowerElem) -> LaurentNum:
    s = x.level.power_sums()
    acc = LaurentNum.zero(x.level.field)
    for a, si in zip(x.coords, s):
        if not _exact_zero(a):
            acc = acc + a * si
    return acc


def norm_to_H(x: TowerElem) -> LaurentNum:
    if x.level.e == 1:
        return x.coords[0]
    return determinant(x.multiplication_matrix())


def embed(x: TowerElem, m: int) -> TowerElem:
    """Image of x in level m ≥ n under v_n ↦ ρ_{η^{m−n}}(v_m)."""
    level = x.level
    if m == level.n:
        return x
    if m < level.n:
        raise ValueError("embedding goes up the tower")
    y = level.image_in(m)
    upper = level.module.level(m)
    acc = upper.zero()
    for c in reversed(x.coords):
        acc = acc * y + c
    return acc


def galois_conjugate(x: TowerElem, a: Any) -> TowerElem:
    """σ_a(x) where σ_a(v_n) = ρ_a(v_n), a a unit modulo π^{n·m0}."""
    from .drinfeld import torsion_action

    level = x.level
    img = torsion_action(level.module, a, level.generator(), check=False)
    acc = level.zero()
    for c in reversed(x.coords):
        acc = acc * img + c
    return acc


def relative_coords(x: TowerElem) -> List[TowerElem]:
    """Coordinates of x at level k+1 over E^k in the basis 1, v_{k+1}, …, v_{k+1}^{D−1}."""
    module = x.level.module
    k = x.level.n - 1
    if k < 1:
        raise ValueError("relative coordinates need a level above 1")
    lower = module.level(k)
    Q = module.root_xpoly(module.m0)
    D = len(Q) - 1
    rest = list(x.coords)
    digits: List[List[LaurentNum]] = []
    for _ in range(lower.e):
        quo, rem = poly_divmod(rest, Q)
        digits.append(rem)
        rest = quo
    for i, c in enumerate(rest):
        if not c.is_zero():
            raise ConsistencyFailure("P_(m0)-adic expansion is longer than the level degree")
    t = lower.t_elem()
    tpow = [lower.one()]
    for _ in range(1, lower.e):
        tpow.append(tpow[-1] * t)
    out = []
    for j in range(D):
        acc = lower.zero()
        for i in range(lower.e):
            c = digits[i][j]
            if not _exact_zero(c):
                acc = acc + tpow[i] * c
        out.append(acc)
    return out


def pull_back(x: TowerElem, n: int) -> TowerElem:
    """Inverse of embed on its image: the element of level n that x comes from."""
    cur = x
    while cur.level.n > n:
        ys = relative_coords(cur)
        for j, y in enumerate(ys[1:], start=1):
            if not y.is_zero():
                raise ConsistencyFailure(
                    f"element of level {cur.level.n} does not come from level {cur.level.n - 1}",
                    {"coordinate": j},
                )
        cur = ys[0]
    return cur


def _relative_power_sums(module: "DrinfeldModule") -> List[LaurentNum]:
    with module._lock:
        key = "relative_power_sums"
        hit = module._series.get(key)
        if hit is None:
            Q = module.root_xpoly(module.m0)
            hit = newton_power_sums(Q, len(Q) - 1)
            module._series[key] = hit
        return hit


def relative_trace_step(x: TowerElem) -> TowerElem:
    sums = _relative_power_sums(x.level.module)
    ys = relative_coords(x)
    acc = ys[0] * sums[0]
    for j in range(1, len(ys)):
        if not _exact_zero(sums[j]):
            acc = acc + ys[j] * sums[j]
    return acc


def relative_norm_step(x: TowerElem) -> TowerElem:
    """Product of the conjugates of x over the level below, pulled back one step."""
    level = x.level
    module = level.module
    k = level.n - 1
    m0 = module.m0
    N = level.n * m0
    acc = level.one()
    for ds in product(range(module.field.base.order), repeat=m0):
        a = [1] + [0] * (N - 1)
        for i, c in enumerate(ds):
            a[k * m0 + i] = module.field.base.add[a[k * m0 + i]][c]
        acc = acc * galois_conjugate(x, a)
    return pull_back(acc, k)


def tower_trace(x: TowerElem, target: Target = "K") -> Union[LaurentNum, TowerElem]:
    """Trace to K, to H, or to a lower level."""
    if target == "H":
        return trace_to_H(x)
    if target == "K":
        return residue_trace_to_K(trace_to_H(x))
    cur = x
    while cur.level.n > int(target):
        cur = relative_trace_step(cur)
    return cur


def tower_norm(x: TowerElem, target: Target = "K") -> Union[LaurentNum, TowerElem]:
    """Norm to K, to H, or to a lower level."""
    if target == "H":
        return norm_to_H(x)
    if target == "K":
        return residue_norm_to_K(norm_to_H(x))
    cur = x
    while cur.level.n > int(target):
        cur = relative_norm_step(cur)
    return cur


def different_generator(level: TowerLevel) -> Tuple[TowerElem, Fraction]:
    """g_n'(v_n) and its valuation, which must be n·m0 − 1/(q−1)."""
    e = level.e
    field = level.field
    coords = [level.g[i] * i for i in range(1, e)] + [LaurentNum.constant(field, field.from_int(e))]
    dg = TowerElem(level, coords)
    val = tower_valuation(dg)
    if val != level.diff_val:
        raise ConsistencyFailure(
            f"different of level {level.n} has valuation {val}, expected {level.diff_val}"
        )
    return dg, val


# -- series lifts -------------------------------------------------------------------------


class XSeries:
    """Laurent series X^shift · Σ c_i X^i over 𝒪_H, known modulo X^order.

    order is None for Laurent polynomials known exactly.
    """

    __slots__ = ("field", "shift", "coeffs", "order")

    def __init__(
        self, field: Any, shift: int, coeffs: Sequence[LaurentNum], order: Optional[int] = None
    ) -> None:
        cs = list(coeffs)
        if order is not None:
            cs = cs[: max(order - shift, 0)]
        while cs and _exact_zero(cs[-1]):
            cs.pop()
        self.field = field
        self.shift = shift
        self.coeffs: Tuple[LaurentNum, ...] = tuple(cs)
        self.order = order

    @classmethod
    def constant(cls, field: Any, c: LaurentNum) -> "XSeries":
        return cls(field, 0, [c])

    def is_exact(self) -> bool:
        return self.order is None

    def coeff(self, k: int) -> LaurentNum:
        if self.order is not None and k >= self.order:
            raise PrecisionExhausted(f"coefficient of X^{k} is beyond X-order {self.order}")
        i = k - self.shift
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return LaurentNum.zero(self.field)

    def __add__(self, other: "XSeries") -> "XSeries":
        order = _min_order(self.order, other.order)
        lo = min(self.shift, other.shift)
        hi = max(self.shift + len(self.coeffs), other.shift + len(other.coeffs))
        if order is not None:
            hi = min(hi, order)
        return XSeries(
            self.field, lo, [self._at(k) + other._at(k) for k in range(lo, hi)], order
        )

    def _at(self, k: int) -> LaurentNum:
        i = k - self.shift
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return LaurentNum.zero(self.field)

    def __mul__(self, other: "XSeries") -> "XSeries":
        zero = LaurentNum.zero(self.field)
        if (not self.coeffs and self.is_exact()) or (not other.coeffs and other.is_exact()):
            return XSeries(self.field, 0, [])
        order = _min_order(
            None if self.order is None else self.order + other.shift,
            None if other.order is None else other.order + self.shift,
        )
        shift = self.shift + other.shift
        if not self.coeffs or not other.coeffs:
            return XSeries(self.field, shift, [], order)
        a, b = self.coeffs, other.coeffs
        if order is not None:
            keep = max(order - shift, 0)
            a, b = a[:keep], b[:keep]
            if not a or not b:
                return XSeries(self.field, shift, [], order)
        out = poly_mul_generic(a, b, zero)
        return XSeries(self.field, shift, out, order)

    def __pow__(self, k: int) -> "XSeries":
        if k < 0:
            raise ValueError("negative powers go through inverse()")
        result = XSeries.constant(self.field, LaurentNum.one(self.field))
        for _ in range(k):
            result = result * self
        return result

    def inverse(self, order: int) -> "XSeries":
        """1/f modulo X^order, for f whose lowest coefficient is a unit of 𝒪_H."""
        if not self.coeffs or not self.coeffs[0].is_unit():
            raise NotSolvable("series inverse needs a unit as lowest coefficient")
        length = order + self.shift
        if self.order is not None:
            length = min(length, self.order - self.shift)
        if length <= 0:
            raise PrecisionExhausted("no coefficient of the inverse is determined")
        a = self.coeffs
        inv0 = a[0].inverse()
        if len(a) == 1 and self.order is None:
            return XSeries(self.field, -self.shift, [inv0])
        out = [inv0]
        for k in range(1, length):
            acc = LaurentNum.zero(self.field)
            for i in range(1, min(k, len(a) - 1) + 1):
                if not _exact_zero(a[i]):
                    acc = acc + a[i] * out[k - i]
            out.append(-(acc * inv0))
        return XSeries(self.field, -self.shift, out, length - self.shift)

    def derivative(self) -> "XSeries":
        return XSeries(
            self.field,
            self.shift - 1,
            [c * (self.shift + i) for i, c in enumerate(self.coeffs)],
            None if self.order is None else self.order - 1,
        )

    def evaluate(self, level: TowerLevel) -> TowerElem:
        acc = level.zero()
        for c in reversed(self.coeffs):
            acc = acc.times_v() + c
        if self.shift:
            acc = acc * level.v_power(self.shift)
        if self.order is not None:
            acc = acc.truncate(Fraction(self.order, level.e))
        return acc

    def to_json(self) -> Dict[str, Any]:
        return {
            "shift": self.shift,
            "coeffs": [c.to_json() for c in self.coeffs],
            "order": self.order,
        }

    def __repr__(self) -> str:
        body = " + ".join(f"({c})X^{i}" for i, c in enumerate(self.coeffs))
        tail = "" if self.order is None else f" + O(X^{self.order})"
        return f"X^{self.shift}·({body}){tail}"


def _min_order(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def additive_series(f: TwistedSeries, order: int) -> XSeries:
    """Σ b_i X^{q^i} modulo X^order; a τ-truncated f caps the order at X^{q^{T+1}}."""
    q = f.field.q
    if f.tau_trunc is not None:
        order = min(order, q ** (f.tau_trunc + 1))
    coeffs: List[LaurentNum] = []
    i = 0
    while i < len(f.coeffs) and q**i < order:
        coeffs += [LaurentNum.zero(f.field)] * (q**i - 1 - len(coeffs)) + [f.coeffs[i]]
        i += 1
    exact = f.tau_trunc is None and i == len(f.coeffs)
    return XSeries(f.field, 1, coeffs, None if exact else order)


def compose(f: XSeries, g: XSeries) -> XSeries:
    """f∘g for f without negative powers and g without constant term."""
    if f.shift < 0:
        raise ValueError("composition needs a lift without negative powers")
    if g.shift < 1:
        raise ValueError("composition needs an inner series without constant term")
    acc = XSeries(f.field, 0, [])
    for c in reversed(f.coeffs):
        acc = acc * g + XSeries.constant(f.field, c)
    if f.order is not None:
        acc = acc + XSeries(f.field, 0, [], (f.order - f.shift) * g.shift)
    return acc * g**f.shift


def lift_to_series(beta: TowerElem) -> XSeries:
    """Canonical lift X^j·U(X) with U(v) the unit part of β."""
    level = beta.level
    mu = tower_valuation(beta)
    j = mu * level.e
    if j.denominator != 1:
        raise ConsistencyFailure(f"valuation {mu} is not a multiple of 1/{level.e}")
    j = int(j)
    unit = beta * level.v_power(-j)
    for i, c in enumerate(unit.coords):
        if c.coeffs and c.valuation() < 0:
            raise NonIntegralUnitPart(
                f"coordinate {i} of the unit part has valuation {c.valuation()}"
            )
    return XSeries(level.field, j, unit.coords)


def composed_lift(beta: TowerElem, m: int, slack: int = 4) -> XSeries:
    """Lift of embed(β, m) as f∘ρ_{η^{m−n}}, f the canonical lift of β at level n.

    Its δ at level m is η^{m−n} times the δ of f at level n. The series is cut at an
    X-order leaving `slack` beyond the different of level m once divided by β.
    """
    level = beta.level
    if m < level.n:
        raise ValueError("composed lifts go up the tower")
    f = lift_to_series(beta)
    if m == level.n:
        return f
    module = level.module
    upper = module.level(m)
    reach = upper.diff_val + tower_valuation(beta) + slack
    order = upper.e * math.ceil(reach) + 1
    rho = additive_series(module.rho_of(module.eta_power(m - level.n)), order)
    return compose(f, rho)


def perturbed_lift(f: XSeries, level: TowerLevel, rng: random.Random) -> XSeries:
    """f + g_n·X^j·t for a random t ∈ 𝒪_H[X]; another lift of f(v_n) in 𝒪_H((X))^×."""
    prec = level.field.working_prec
    t = [LaurentNum.random(level.field, rng, 0, prec) for _ in range(level.e)]
    return f + XSeries(level.field, 0, level.g_poly()) * XSeries(level.field, f.shift, t)
