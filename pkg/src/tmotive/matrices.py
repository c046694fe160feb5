"""Small dense matrices of PuiseuxNumbers, as lists of rows."""
from __future__ import annotations

from .errors import DivisionByZeroAtPrecision
from .puiseux import INF, PuiseuxNumber, frob_twist


def zeros(tower, n, m=None):
    m = n if m is None else m
    return [[PuiseuxNumber.zero(tower) for _ in range(m)] for _ in range(n)]


def identity(tower, n):
    out = zeros(tower, n)
    for i in range(n):
        out[i][i] = PuiseuxNumber.const(tower, 1)
    return out


def const_matrix(tower, rows):
    """Matrix from nested lists of ints / FF / PuiseuxNumber."""
    return [[v if isinstance(v, PuiseuxNumber) else PuiseuxNumber.const(tower, v) for v in r]
            for r in rows]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_neg(A):
    return [[-a for a in r] for r in A]


def mat_mul(A, B):
    tower = A[0][0].tower
    out = []
    for r in A:
        row = []
        for j in range(len(B[0])):
            acc = PuiseuxNumber.zero(tower)
            for k, a in enumerate(r):
                b = B[k][j]
                if (a.is_exact() and a.is_zero()) or (b.is_exact() and b.is_zero()):
                    continue
                acc = acc + a * b
            row.append(acc)
        out.append(row)
    return out


def mat_scale(c, A):
    return [[c * a for a in r] for r in A]


def mat_twist(A, j, cap=None):
    return [[frob_twist(a, j, cap) for a in r] for r in A]


def transpose(A):
    return [list(r) for r in zip(*A)]


def is_zero_matrix(A):
    return all(a.is_zero() for r in A for a in r)


def min_valuation(A):
    # zeros known only to a precision count with that precision
    return min((a.valuation() for r in A for a in r if not (a.is_exact() and a.is_zero())),
               default=INF)


def min_precision(A):
    return min((a.precision() for r in A for a in r), default=INF)


def det2(A):
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


def inv2(A):
    d = det2(A)
    if d.is_zero():
        raise DivisionByZeroAtPrecision("singular 2x2 matrix at precision")
    di = d.inverse()
    return [[A[1][1] * di, -A[0][1] * di], [-A[1][0] * di, A[0][0] * di]]


def column(Z):
    """Normalize a column given as a flat list."""
    return [[z] for z in Z]
