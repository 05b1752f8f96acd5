"""Small exact linear algebra kit over the rationals.

Matrices are lists of lists of ``Fraction``; all routines are pure and
return fresh matrices.  Sizes in this package stay tiny (dimension <= 5),
so plain Gaussian elimination with exact fractions is the right tool.
"""

from __future__ import annotations

from fractions import Fraction

from .polyring import RationalPoly


def mat(entries) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in entries]


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def zeros(n: int, m: int | None = None) -> list[list[Fraction]]:
    m = n if m is None else m
    return [[Fraction(0)] * m for _ in range(n)]


def mat_mul(a, b) -> list[list[Fraction]]:
    n, k, m = len(a), len(b), len(b[0])
    out = zeros(n, m)
    for i in range(n):
        for t in range(k):
            if a[i][t]:
                ait = a[i][t]
                for j in range(m):
                    if b[t][j]:
                        out[i][j] += ait * b[t][j]
    return out


def mat_vec(a, v) -> list[Fraction]:
    return [sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in a]


def mat_scal(a, c) -> list[list[Fraction]]:
    c = Fraction(c)
    return [[e * c for e in row] for row in a]


def mat_sub(a, b) -> list[list[Fraction]]:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def transpose(a) -> list[list[Fraction]]:
    return [list(col) for col in zip(*a)]


def det(a) -> Fraction:
    n = len(a)
    m = [row[:] for row in mat(a)]
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        out *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] * inv
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return out


def inverse(a) -> list[list[Fraction]]:
    n = len(a)
    m = [row[:] + ident_row for row, ident_row in zip(mat(a), identity(n))]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [e * inv for e in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [e - f * g for e, g in zip(m[r], m[c])]
    return [row[n:] for row in m]


def matrix_power(a, k: int) -> list[list[Fraction]]:
    n = len(a)
    if k < 0:
        return matrix_power(inverse(a), -k)
    out = identity(n)
    base = mat(a)
    while k:
        if k & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        k >>= 1
    return out


def rank(a) -> int:
    if not a:
        return 0
    m = [row[:] for row in mat(a)]
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        for i in range(r + 1, rows):
            if m[i][c]:
                f = m[i][c] * inv
                for k in range(c, cols):
                    m[i][k] -= f * m[r][k]
        r += 1
        if r == rows:
            break
    return r


def charpoly(a) -> RationalPoly:
    """Characteristic polynomial det(tI - a), monic, by Faddeev-LeVerrier."""
    n = len(a)
    a = mat(a)
    coeffs = [Fraction(1)]  # leading coefficient of t^n
    m = [row[:] for row in a]
    for k in range(1, n + 1):
        ck = -sum(m[i][i] for i in range(n)) / k
        coeffs.append(ck)
        if k < n:
            for i in range(n):
                m[i][i] += ck
            m = mat_mul(a, m)
    return RationalPoly(list(reversed(coeffs)))
