"""Finite residue fields 𝔽_{q^d}, q = p^k, as lookup tables.

Elements are plain ints: the base-p digits of an element are the coefficients of its
polynomial representative modulo the field's modulus (lowest degree first). Addition,
multiplication, inversion and the q-Frobenius are table lookups built once per field.
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import Poly, isprime, symbols

from .errors import InvalidModule

# Tables are Q x Q; keep them small enough to build in well under a second.
MAX_ORDER = 512

_X = symbols("X")


def is_irreducible(p: int, coeffs: Sequence[int]) -> bool:
    """Irreducibility over 𝔽_p of the polynomial with coefficients `coeffs` (low to high)."""
    return Poly(list(reversed([int(c) % p for c in coeffs])), _X, modulus=p).is_irreducible


def next_irreducible(p: int, degree: int) -> Tuple[int, ...]:
    """First monic irreducible polynomial of `degree` over 𝔽_p in lexicographic order."""
    for c in range(p**degree):
        coeffs = [(c // p**i) % p for i in range(degree)] + [1]
        if is_irreducible(p, coeffs):
            return tuple(coeffs)
    raise InvalidModule(f"no irreducible polynomial of degree {degree} over GF({p})")


class FieldSpec:
    """The residue field 𝔽_{q^d} with q = p^k.

    d = 1 describes the residue field of K, d = d_H that of the unramified extension H.
    `base` is the field 𝔽_q (the object itself when d = 1); `embed` and `restrict` move
    elements between the two encodings.
    """

    def __init__(
        self,
        p: int,
        k: int = 1,
        d: int = 1,
        modulus: Optional[Sequence[int]] = None,
        working_prec: int = 32,
    ) -> None:
        if not isinstance(p, int) or not isprime(p):
            raise InvalidModule(f"residue characteristic must be prime, got {p!r}")
        if k < 1 or d < 1:
            raise InvalidModule("field.k and field.d_h must be positive")
        self.p = p
        self.k = k
        self.d = d
        self.q = p**k
        self.degree = k * d
        self.order = p ** (k * d)
        if self.order > MAX_ORDER:
            raise InvalidModule(f"residue field of order {self.order} exceeds {MAX_ORDER}")
        if modulus is None:
            modulus = next_irreducible(p, self.degree)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != self.degree + 1 or modulus[-1] != 1:
            raise InvalidModule(f"modulus must be monic of degree {self.degree}")
        if not is_irreducible(p, modulus):
            raise InvalidModule(f"modulus {modulus} is reducible over GF({p})")
        self.modulus = modulus
        self.working_prec = working_prec
        self._build_tables()
        self.base = self if d == 1 else field_spec(p, k, 1, working_prec)
        self._build_embedding()

    # -- construction -------------------------------------------------------------------

    @classmethod
    def create(
        cls,
        p: int,
        k: int = 1,
        d: int = 1,
        modulus: Optional[Sequence[int]] = None,
        working_prec: int = 32,
        seed: int = 0,
    ) -> "FieldSpec":
        """Build the field and spot-check its tables."""
        fs = cls(p, k, d, modulus, working_prec)
        fs.check_axioms(random.Random(f"{seed}:field"))
        return fs

    def _digits(self, x: int) -> List[int]:
        p = self.p
        return [(x // p**i) % p for i in range(self.degree)]

    def _encode(self, digits: Sequence[int]) -> int:
        p = self.p
        return sum((c % p) * p**i for i, c in enumerate(digits))

    def _mulmod_digits(self, a: Sequence[int], b: Sequence[int]) -> List[int]:
        p, f, m = self.p, self.degree, self.modulus
        prod = [0] * (2 * f - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] = (prod[i + j] + ai * bj) % p
        for t in range(len(prod) - 1, f - 1, -1):
            c = prod[t]
            if c:
                for i in range(f + 1):
                    prod[t - f + i] = (prod[t - f + i] - c * m[i]) % p
        return prod[:f]

    def _build_tables(self) -> None:
        Q, p = self.order, self.p
        exp: List[int] = [1]
        for g in range(1 if Q == 2 else 2, Q):
            exp = [1]
            x = 1
            gd = self._digits(g)
            for _ in range(Q - 2):
                x = self._encode(self._mulmod_digits(self._digits(x), gd))
                if x == 1:
                    break
                exp.append(x)
            if len(exp) == Q - 1:
                self.generator = g
                break
        log = [-1] * Q
        for i, x in enumerate(exp):
            log[x] = i
        self._exp = exp
        self._log = log

        n = Q - 1
        self.mul: List[List[int]] = [[0] * Q for _ in range(Q)]
        for a in range(1, Q):
            la = log[a]
            row = self.mul[a]
            for b in range(1, Q):
                row[b] = exp[(la + log[b]) % n]
        if p == 2:
            self.add = [[a ^ b for b in range(Q)] for a in range(Q)]
            self.neg = list(range(Q))
        else:
            digits = [self._digits(a) for a in range(Q)]
            self.add = [
                [self._encode([x + y for x, y in zip(digits[a], digits[b])]) for b in range(Q)]
                for a in range(Q)
            ]
            self.neg = [self._encode([-x for x in digits[a]]) for a in range(Q)]
        self.inv = [0] + [exp[(-log[a]) % n] for a in range(1, Q)]
        self._frob: List[List[int]] = []
        for i in range(self.d):
            e = self.q**i
            self._frob.append([0] + [exp[(log[a] * e) % n] for a in range(1, Q)])

    def _build_embedding(self) -> None:
        if self.d == 1:
            self.embed = list(range(self.order))
        else:
            base = self.base
            theta = None
            for cand in range(self.order):
                acc = 0
                for i in range(len(base.modulus) - 1, -1, -1):
                    acc = self.add[self.mul[acc][cand]][base.modulus[i] % self.p]
                if acc == 0:
                    theta = cand
                    break
            if theta is None:  # pragma: no cover - a subfield of order q always exists
                raise InvalidModule("base field does not embed")
            powers = [1]
            for _ in range(1, base.degree):
                powers.append(self.mul[powers[-1]][theta])
            self.embed = []
            for b in range(base.order):
                acc = 0
                for c, t in zip(base._digits(b), powers):
                    acc = self.add[acc][self.mul[c][t]]
                self.embed.append(acc)
        self.restrict: Dict[int, int] = {x: b for b, x in enumerate(self.embed)}
        self.base_elements = list(self.embed)

    # -- element helpers ----------------------------------------------------------------

    def frob_table(self, i: int) -> List[int]:
        """Table of x -> x^{q^i}."""
        return self._frob[i % self.d]

    def from_int(self, n: int) -> int:
        return n % self.p

    def from_coords(self, coords: Sequence[int]) -> int:
        """Element with the given 𝔽_p coordinates in the polynomial basis."""
        if len(coords) > self.degree:
            raise InvalidModule(f"{len(coords)} coordinates for a degree-{self.degree} field")
        return self._encode(list(coords))

    def pow(self, x: int, e: int) -> int:
        if x == 0:
            return 0 if e > 0 else 1
        return self._exp[(self._log[x] * e) % (self.order - 1)]

    def trace_to_base(self, x: int) -> int:
        s = 0
        for t in self._frob:
            s = self.add[s][t[x]]
        return self.restrict[s]

    def norm_to_base(self, x: int) -> int:
        s = 1
        for t in self._frob:
            s = self.mul[s][t[x]]
        return self.restrict[s]

    def random_element(self, rng: random.Random, nonzero: bool = False) -> int:
        return rng.randrange(1 if nonzero else 0, self.order)

    def coords_over_base(self, x: int) -> Tuple[int, ...]:
        """Coordinates of x over 𝔽_q in the basis 1, g, ..., g^{d-1} (g the generator)."""
        table = getattr(self, "_base_coords", None)
        if table is None:
            powers = [1]
            for _ in range(1, self.d):
                powers.append(self.mul[powers[-1]][self.generator])
            table = {}
            for cs in product(range(self.base.order), repeat=self.d):
                acc = 0
                for c, t in zip(cs, powers):
                    acc = self.add[acc][self.mul[self.embed[c]][t]]
                table[acc] = cs
            self._base_coords = table
        return table[x]

    def check_axioms(self, rng: random.Random, samples: int = 50) -> None:
        """Spot-check the field axioms and the Frobenius on random elements."""
        add, mul, Q = self.add, self.mul, self.order
        frob = self.frob_table(1)
        for _ in range(samples):
            a, b, c = rng.randrange(Q), rng.randrange(Q), rng.randrange(Q)
            if mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]]:
                raise InvalidModule("distributivity fails")
            if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
                raise InvalidModule("associativity fails")
            if a and mul[a][self.inv[a]] != 1:
                raise InvalidModule("inverse fails")
            if frob[add[a][b]] != add[frob[a]][frob[b]]:
                raise InvalidModule("Frobenius is not additive")
        for x in self.base_elements:
            if frob[x] != x:
                raise InvalidModule("Frobenius moves an element of the base field")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return (self.p, self.k, self.d, self.modulus) == (other.p, other.k, other.d, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.d, self.modulus))

    def __repr__(self) -> str:
        return f"FieldSpec(p={self.p}, k={self.k}, d={self.d}, modulus={self.modulus})"


@lru_cache(maxsize=None)
def field_spec(p: int, k: int = 1, d: int = 1, working_prec: int = 32) -> FieldSpec:
    """Shared FieldSpec instance for (p, k, d) with the default modulus."""
    return FieldSpec(p, k, d, working_prec=working_prec)
