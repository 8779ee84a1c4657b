"""Exact linear algebra over the rationals.

Matrices are lists of lists of Fraction (or int where noted).  Elimination
uses the Bareiss fraction-free scheme on an integer rescaling of the input,
so every intermediate division is exact and entry growth stays polynomial.
Sizes here are desk scale; nothing is tuned beyond that.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .errors import BasisError

Matrix = list[list[Fraction]]


def _common_denominator(rows: Matrix) -> int:
    d = 1
    for row in rows:
        for x in row:
            d = lcm(d, Fraction(x).denominator)
    return d


def _to_integer_matrix(rows: Matrix) -> tuple[list[list[int]], int]:
    # Returns (d * rows, d) with d the least common denominator.
    d = _common_denominator(rows)
    scaled = [[int(Fraction(x) * d) for x in row] for row in rows]
    return scaled, d


def bareiss_eliminate(rows: list[list[int]], ncols_main: int) -> tuple[list[list[int]], list[int], int]:
    """Fraction-free forward elimination on an integer matrix.

    Eliminates below the diagonal of the leading ``ncols_main`` columns;
    trailing columns (an augmented part) are carried through the same row
    operations.  Returns the reduced rows, the pivot column used at each
    step, and the sign accumulated from row swaps.  The last pivot times
    the swap sign is the determinant of the leading square block when
    ``ncols_main`` equals the row count.
    """
    m = [row[:] for row in rows]
    n = len(m)
    sign = 1
    prev = 1
    pivots: list[int] = []
    r = 0
    for c in range(ncols_main):
        if r >= n:
            break
        p = next((i for i in range(r, n) if m[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
            sign = -sign
        for i in range(r + 1, n):
            for j in range(c + 1, len(m[i])):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        pivots.append(c)
        r += 1
    return m, pivots, sign


def determinant(rows: Matrix) -> Fraction:
    """Determinant of a square rational matrix."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    for row in rows:
        if len(row) != n:
            raise ValueError("matrix is not square")
    scaled, d = _to_integer_matrix(rows)
    m, pivots, sign = bareiss_eliminate(scaled, n)
    if len(pivots) < n:
        return Fraction(0)
    return Fraction(sign * m[n - 1][n - 1], d**n)


def integer_determinant(rows: list[list[int]]) -> int:
    """Determinant of a square integer matrix, computed without fractions."""
    n = len(rows)
    if n == 0:
        return 1
    m, pivots, sign = bareiss_eliminate([list(r) for r in rows], n)
    if len(pivots) < n:
        return 0
    return sign * m[n - 1][n - 1]


def inverse(rows: Matrix) -> Matrix:
    """Inverse of a square rational matrix.

    Raises BasisError if the matrix is singular.  Forward elimination is
    fraction free on the integer rescaling; the triangular solves that
    follow are done with exact rationals.
    """
    n = len(rows)
    if n == 0:
        return []
    scaled, d = _to_integer_matrix(rows)
    aug = [scaled[i] + [d if j == i else 0 for j in range(n)] for i in range(n)]
    m, pivots, _ = bareiss_eliminate(aug, n)
    if len(pivots) < n:
        raise BasisError("matrix is singular")
    inv: Matrix = [[Fraction(0)] * n for _ in range(n)]
    for col in range(n):
        x = [Fraction(0)] * n
        for i in range(n - 1, -1, -1):
            s = Fraction(m[i][n + col])
            for j in range(i + 1, n):
                s -= m[i][j] * x[j]
            x[i] = s / m[i][i]
        for i in range(n):
            inv[i][col] = x[i]
    return inv


def solve(rows: Matrix, rhs: list[Fraction]) -> list[Fraction]:
    """Solve a square rational system by Gaussian elimination.

    This is a plain rational pivot-and-eliminate pass, deliberately a
    different code path from :func:`inverse`.  Raises BasisError on a
    singular matrix.
    """
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(rows)]
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            raise BasisError("matrix is singular")
        a[c], a[p] = a[p], a[c]
        for i in range(c + 1, n):
            if a[i][c] == 0:
                continue
            f = a[i][c] / a[c][c]
            for j in range(c, n + 1):
                a[i][j] -= f * a[c][j]
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = a[i][n]
        for j in range(i + 1, n):
            s -= a[i][j] * x[j]
        x[i] = s / a[i][i]
    return x


def is_positive_definite(rows: Matrix) -> bool:
    """Sylvester criterion with exact leading principal minors."""
    n = len(rows)
    for k in range(1, n + 1):
        minor = [row[:k] for row in rows[:k]]
        if determinant(minor) <= 0:
            return False
    return True
