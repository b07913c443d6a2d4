"""Exact linear algebra over the rationals.

Matrices are lists of rows of ``Fraction``. Ranks use fraction-free
(Bareiss) elimination on an integer copy; solving uses forward elimination
plus back substitution with free variables set to zero.
"""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction
from math import lcm

Matrix = list[list[Fraction]]


def copy_matrix(m: Sequence[Sequence[Fraction]]) -> Matrix:
    return [[Fraction(x) for x in row] for row in m]


def _integer_rows(m: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    rows = []
    for row in m:
        scale = lcm(*(Fraction(x).denominator for x in row)) if row else 1
        rows.append([int(Fraction(x) * scale) for x in row])
    return rows


def rank(m: Sequence[Sequence[Fraction]]) -> int:
    """Rank by Bareiss elimination; exact and free of coefficient blowup."""
    if not m or not m[0]:
        return 0
    a = _integer_rows(m)
    n_rows, n_cols = len(a), len(a[0])
    piv_r = 0
    prev = 1
    for piv_c in range(n_cols):
        pivot = next((r for r in range(piv_r, n_rows) if a[r][piv_c] != 0), None)
        if pivot is None:
            continue
        if pivot != piv_r:
            a[piv_r], a[pivot] = a[pivot], a[piv_r]
        p = a[piv_r][piv_c]
        for r in range(piv_r + 1, n_rows):
            for c in range(piv_c + 1, n_cols):
                a[r][c] = (a[r][c] * p - a[r][piv_c] * a[piv_r][c]) // prev
            a[r][piv_c] = 0
        prev = p
        piv_r += 1
        if piv_r == n_rows:
            break
    return piv_r


def _forward(m: Matrix, t: list[Fraction] | None) -> list[int]:
    """Row echelon form in place; returns the free columns."""
    free_vars = []
    n_rows, n_cols = len(m), len(m[0]) if m else 0
    piv_r = 0
    for piv_c in range(n_cols):
        pivot = next((r for r in range(piv_r, n_rows) if m[r][piv_c] != 0), None)
        if pivot is None:
            free_vars.append(piv_c)
            continue
        if pivot != piv_r:
            m[piv_r], m[pivot] = m[pivot], m[piv_r]
            if t is not None:
                t[piv_r], t[pivot] = t[pivot], t[piv_r]
        fp = m[piv_r][piv_c]
        for r in range(piv_r + 1, n_rows):
            fr = m[r][piv_c]
            if fr == 0:
                continue
            frp = fr / fp
            for c in range(piv_c, n_cols):
                m[r][c] -= m[piv_r][c] * frp
            if t is not None:
                t[r] -= t[piv_r] * frp
        piv_r += 1
    return free_vars


def solve(m: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """One solution of m x = rhs, or None when the system is inconsistent."""
    n_rows = len(m)
    if n_rows == 0:
        return []
    n_cols = len(m[0])
    a = copy_matrix(m)
    t = [Fraction(x) for x in rhs]
    if n_cols == 0:
        return [] if all(x == 0 for x in t) else None
    free_vars = _forward(a, t)
    r = n_cols - len(free_vars)
    if any(t[i] != 0 for i in range(r, n_rows)):
        return None
    free = set(free_vars)
    piv_cols = [c for c in range(n_cols) if c not in free]
    sol = [Fraction(0)] * n_cols
    for row in range(len(piv_cols) - 1, -1, -1):
        piv_c = piv_cols[row]
        s = -t[row]
        for c in range(piv_c + 1, n_cols):
            s += a[row][c] * sol[c]
        sol[piv_c] = -s / a[row][piv_c]
    return sol


def identity_matrix(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def inverse(m: Sequence[Sequence[Fraction]]) -> Matrix | None:
    """Inverse of a square matrix, None when singular."""
    n = len(m)
    if rank(m) < n:
        return None
    columns = []
    for j in range(n):
        col = solve(m, [Fraction(int(i == j)) for i in range(n)])
        assert col is not None
        columns.append(col)
    return [[columns[j][i] for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [
        [sum((a[i][k] * b[k][j] for k in range(inner)), Fraction(0)) for j in range(cols)]
        for i in range(len(a))
    ]


def is_zero_matrix(m: Sequence[Sequence[Fraction]]) -> bool:
    return all(x == 0 for row in m for x in row)
