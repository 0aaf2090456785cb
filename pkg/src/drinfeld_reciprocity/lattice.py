"""Linear algebra over H, K and the valuation ring 𝒪 at finite precision.

Matrices are lists of rows of LaurentNum. Elimination always pivots on an entry of least
valuation, so every multiplier stays integral and no precision is lost to cancellation in
the pivot.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .errors import NotSolvable, SingularSystem
from .laurent import LaurentNum

Matrix = List[List[LaurentNum]]


def _copy(A: Sequence[Sequence[LaurentNum]]) -> Matrix:
    return [list(row) for row in A]


def _pivot(A: Matrix, rows: range, cols: range) -> Optional[Tuple[int, int]]:
    best = None
    best_val = None
    for i in rows:
        for j in cols:
            x = A[i][j]
            if x.is_zero():
                continue
            if best_val is None or x.valuation() < best_val:
                best, best_val = (i, j), x.valuation()
    return best


def identity(field, n: int) -> Matrix:
    return [
        [LaurentNum.one(field) if i == j else LaurentNum.zero(field) for j in range(n)]
        for i in range(n)
    ]


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    field = A[0][0].field
    out = []
    for row in A:
        new = []
        for j in range(len(B[0])):
            acc = LaurentNum.zero(field)
            for k, a in enumerate(row):
                if not (a.is_zero() and a.is_exact()):
                    acc = acc + a * B[k][j]
            new.append(acc)
        out.append(new)
    return out


def mat_vec(A: Matrix, x: Sequence[LaurentNum]) -> List[LaurentNum]:
    return [row[0] for row in mat_mul(A, [[xi] for xi in x])]


def solve_linear(A: Sequence[Sequence[LaurentNum]], b: Sequence[LaurentNum]) -> List[LaurentNum]:
    """Solve the square system A x = b over the fraction field."""
    n = len(A)
    M = _copy(A)
    rhs = list(b)
    order = list(range(n))
    for k in range(n):
        piv = _pivot(M, range(k, n), range(k, n))
        if piv is None:
            raise SingularSystem(f"matrix is singular to precision at step {k}")
        i, j = piv
        M[k], M[i] = M[i], M[k]
        rhs[k], rhs[i] = rhs[i], rhs[k]
        if j != k:
            for row in M:
                row[k], row[j] = row[j], row[k]
            order[k], order[j] = order[j], order[k]
        inv = M[k][k].inverse()
        for r in range(k + 1, n):
            if M[r][k].is_zero():
                continue
            f = M[r][k] * inv
            for c in range(k, n):
                M[r][c] = M[r][c] - f * M[k][c]
            rhs[r] = rhs[r] - f * rhs[k]
    y = [LaurentNum.zero(M[0][0].field)] * n
    for k in range(n - 1, -1, -1):
        acc = rhs[k]
        for c in range(k + 1, n):
            acc = acc - M[k][c] * y[c]
        y[k] = acc / M[k][k]
    x = [LaurentNum.zero(M[0][0].field)] * n
    for k, col in enumerate(order):
        x[col] = y[k]
    return x


def determinant(A: Sequence[Sequence[LaurentNum]]) -> LaurentNum:
    n = len(A)
    M = _copy(A)
    field = M[0][0].field
    det = LaurentNum.one(field)
    for k in range(n):
        piv = _pivot(M, range(k, n), range(k, k + 1))
        if piv is None:
            prec = min(M[r][k].abs_prec for r in range(k, n))
            return LaurentNum.zero(field, prec)
        i, _ = piv
        if i != k:
            M[k], M[i] = M[i], M[k]
            det = -det
        det = det * M[k][k]
        inv = M[k][k].inverse()
        for r in range(k + 1, n):
            if M[r][k].is_zero():
                continue
            f = M[r][k] * inv
            for c in range(k, n):
                M[r][c] = M[r][c] - f * M[k][c]
    return det


@dataclass
class SmithForm:
    """U·A·V = S with S diagonal; `exponents` are the π-valuations of the diagonal."""

    U: Matrix
    V: Matrix
    S: Matrix
    exponents: List[int]


def smith_reduce(A: Sequence[Sequence[LaurentNum]], N: int) -> SmithForm:
    """Smith reduction of an integral matrix over 𝒪/π^N.

    Diagonal entries that vanish modulo π^N get exponent N.
    """
    rows, cols = len(A), len(A[0])
    field = A[0][0].field
    M = [[x.truncate(N) for x in row] for row in A]
    U = identity(field, rows)
    V = identity(field, cols)
    exps: List[int] = []
    for k in range(min(rows, cols)):
        piv = _pivot(M, range(k, rows), range(k, cols))
        if piv is None:
            exps.extend([N] * (min(rows, cols) - k))
            break
        i, j = piv
        M[k], M[i] = M[i], M[k]
        U[k], U[i] = U[i], U[k]
        if j != k:
            for row in M:
                row[k], row[j] = row[j], row[k]
            for row in V:
                row[k], row[j] = row[j], row[k]
        p = M[k][k]
        exps.append(p.valuation())
        inv = p.inverse(prec=N)
        for r in range(k + 1, rows):
            if M[r][k].is_zero():
                continue
            f = (M[r][k] * inv).truncate(N)
            for c in range(k, cols):
                M[r][c] = (M[r][c] - f * M[k][c]).truncate(N)
            for c in range(rows):
                U[r][c] = (U[r][c] - f * U[k][c]).truncate(N)
        for c in range(k + 1, cols):
            if M[k][c].is_zero():
                continue
            f = (M[k][c] * inv).truncate(N)
            for r in range(k, rows):
                M[r][c] = (M[r][c] - f * M[r][k]).truncate(N)
            for r in range(cols):
                V[r][c] = (V[r][c] - f * V[r][k]).truncate(N)
    return SmithForm(U, V, M, exps)


def solve_mod(
    C: Sequence[Sequence[LaurentNum]], A: Sequence[LaurentNum], N: int
) -> Tuple[List[LaurentNum], SmithForm]:
    """The unique z with C z ≡ A modulo π^N.

    Raises SingularSystem when some invariant factor is not a unit (no uniqueness) and
    NotSolvable when the system has no solution.
    """
    rows, cols = len(C), len(C[0])
    if rows < cols:
        raise SingularSystem(f"{rows} equations for {cols} unknowns")
    sf = smith_reduce(C, N)
    if any(e != 0 for e in sf.exponents[:cols]):
        raise SingularSystem(
            "generating family is degenerate", {"exponents": sf.exponents[:cols]}
        )
    ua = [x.truncate(N) for x in mat_vec(sf.U, list(A))]
    for i in range(cols, rows):
        if not ua[i].is_zero():
            raise NotSolvable(
                "system has no solution modulo π^N", {"row": i, "residual": repr(ua[i])}
            )
    y = [(ua[i] * sf.S[i][i].inverse(prec=N)).truncate(N) for i in range(cols)]
    z = [x.truncate(N) for x in mat_vec(sf.V, y)]
    return z, sf
