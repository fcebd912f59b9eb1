"""Small exact linear algebra over Q (row-major lists of Fractions)."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def transpose(m: Sequence[Sequence[Fraction]]) -> Matrix:
    return [list(col) for col in zip(*m)]


def rref(m: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = to_matrix(m)
    if not a:
        return a, []
    rows, cols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    return len(rref(m)[1]) if m else 0


def nullspace(m: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of ``{x : m x = 0}``, one vector per free column (that entry is 1)."""
    if not m:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    a, pivots = rref(m)
    n = len(a[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(a, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(m: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """One solution of ``m x = b`` or None when inconsistent."""
    aug = [list(row) + [bi] for row, bi in zip(m, b)]
    a, pivots = rref(aug)
    n = len(m[0])
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(a, pivots):
        x[p] = row[n]
    return x


def matvec(m: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in m]


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def span_rank(vectors: Sequence[Sequence]) -> int:
    return rank([list(v) for v in vectors]) if vectors else 0


def in_span(vectors: Sequence[Sequence], v: Sequence) -> bool:
    if not any(v):
        return True
    if not vectors:
        return False
    return span_rank(list(vectors) + [v]) == span_rank(vectors)


def row_basis(vectors: Sequence[Sequence]) -> list[list[Fraction]]:
    """Independent vectors spanning the same space, in reduced form."""
    if not vectors:
        return []
    a, pivots = rref([list(v) for v in vectors])
    return a[: len(pivots)]


def det(m: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-free (Bareiss) elimination on integers."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    den = 1
    for row in m:
        for x in row:
            den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
    a = [[int(Fraction(x) * den) for x in row] for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k]), None)
            if p is None:
                return Fraction(0)
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], den**n)
