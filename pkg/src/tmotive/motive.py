"""t-motives  T e = theta e + A_1 tau e + ... + A_k tau^k e  and their exponentials."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .additive import AdditiveSeries, TailBound
from .errors import ShapeError, TailNotConvergent
from .matrices import (const_matrix, identity, is_zero_matrix, mat_add, mat_mul,
                       mat_scale, mat_twist, min_valuation, zeros)
from .puiseux import INF, PuiseuxNumber, frob_twist, parse, theta_diff
from .scalars import tower as get_tower


@dataclass(frozen=True)
class MotiveSpec:
    """Dimension n, rank r and the matrices A_1..A_k (A_0 = theta I)."""

    n: int
    r: int
    A: tuple
    name: str = ""

    def __post_init__(self):
        if not self.A or is_zero_matrix(self.A[-1]):
            raise ShapeError("the leading matrix A_k must be nonzero")
        for M in self.A:
            if len(M) != self.n or any(len(row) != self.n for row in M):
                raise ShapeError(f"expected {self.n}x{self.n} matrices")

    @property
    def tower(self):
        return self.A[0][0][0].tower

    @property
    def k(self):
        return len(self.A)

    def to_json(self):
        return json.dumps({
            "n": self.n, "r": self.r, "name": self.name,
            "q": self.tower.q,
            "matrices": [[[x.to_literal() for x in row] for row in M] for M in self.A],
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text, tower=None):
        d = json.loads(text)
        tower = tower or get_tower(d.get("q", 2))
        A = tuple([[parse(x, tower) for x in row] for row in M] for M in d["matrices"])
        return cls(d["n"], d["r"], A, d.get("name", ""))


def _p(tower, x):
    return x if isinstance(x, PuiseuxNumber) else PuiseuxNumber.const(tower, x)


def make_carlitz(tower=None):
    tower = tower or get_tower()
    return MotiveSpec(1, 1, (const_matrix(tower, [[1]]),), "carlitz")


def make_carlitz2(tower=None):
    tower = tower or get_tower()
    return MotiveSpec(1, 2, (const_matrix(tower, [[0]]), const_matrix(tower, [[1]])), "carlitz2")


def make_pure(a1, a2, tower=None):
    tower = tower or _tower_of(a1, a2)
    A1 = [[_p(tower, 0), -_p(tower, a1)], [_p(tower, 1), -_p(tower, a2)]]
    A2 = const_matrix(tower, [[0, 1], [0, 0]])
    return MotiveSpec(2, 3, (A1, A2), "pure")


def make_nonpure(A, tower=None):
    """A = [[a11, a12], [a21, 1]];  A_2 = E_11."""
    flat = [x for row in A for x in row]
    tower = tower or _tower_of(*flat)
    if len(A) != 2 or any(len(row) != 2 for row in A):
        raise ShapeError("A must be 2x2")
    A1 = [[_p(tower, x) for x in row] for row in A]
    if not (A1[1][1].is_exact() and A1[1][1] == 1):
        raise ShapeError("the lower-right entry of A must be 1")
    A2 = const_matrix(tower, [[1, 0], [0, 0]])
    return MotiveSpec(2, 3, (A1, A2), "nonpure")


def make_Ma(a, tower=None):
    tower = tower or _tower_of(a)
    m = make_nonpure([[0, a], [0, 1]], tower)
    return MotiveSpec(m.n, m.r, m.A, "M(a)")


def make_Mt(a, tower=None):
    tower = tower or _tower_of(a)
    m = make_nonpure([[0, 0], [a, 1]], tower)
    return MotiveSpec(m.n, m.r, m.A, "M_t(a)")


def _tower_of(*xs):
    for x in xs:
        if isinstance(x, PuiseuxNumber):
            return x.tower
        if hasattr(x, "tower"):
            return x.tower
    return get_tower()


def t_action(m, Z):
    """T(Z) = theta Z + sum_i A_i Z^(i) for a column Z (flat list)."""
    tower = m.tower
    th = PuiseuxNumber.theta(tower)
    out = [th * z for z in Z]
    for i, Ai in enumerate(m.A, start=1):
        Zi = [frob_twist(z, i) for z in Z]
        for r in range(m.n):
            for c in range(m.n):
                a = Ai[r][c]
                if a.is_exact() and a.is_zero():
                    continue
                out[r] = out[r] + a * Zi[c]
    return out


# -- exponential ------------------------------------------------------------

def _alphas(m):
    return [min_valuation(Ai) for Ai in m.A]


def _bound_step(q, alphas, b, mm):
    # b_m >= q^m + min_i (alpha_i + q^i b_{m-i})
    best = INF
    for i, al in enumerate(alphas, start=1):
        if al == INF or mm - i < 0 or b[mm - i] == INF:
            continue
        best = min(best, al + q ** i * b[mm - i])
    return INF if best == INF else q ** mm + best


def coefficient_bounds(m, M, actual=None):
    """Lower bounds b_0..b_M for v(C_m); uses actual valuations where given."""
    q = m.tower.q
    alphas = _alphas(m)
    b = []
    for mm in range(M + 1):
        if actual is not None and mm < len(actual):
            b.append(Fraction(actual[mm]) if actual[mm] != INF else INF)
        elif mm == 0:
            b.append(Fraction(0))
        else:
            b.append(_bound_step(q, alphas, b, mm))
    return b


def tail_bound(m, b):
    """TailBound valid for m > len(b) - 1, given bounds b_0..b_M for v(C_m).

    For q^m >= -min(alpha) the recurrence gives beta_m >= min of the k
    previous beta (beta_m = b_m / q^m), so the minimum over one window past
    M bounds every later term.  Returns None when no such bound exists yet.
    """
    q = m.tower.q
    alphas = _alphas(m)
    amin = min(a for a in alphas if a != INF)
    M = len(b) - 1
    if q ** (M + 1) + amin < 0:
        return None
    ext = list(b)
    for mm in range(M + 1, M + m.k + 1):
        ext.append(_bound_step(q, alphas, ext, mm))
    betas = [ext[mm] / Fraction(q ** mm) for mm in range(M + 1, M + m.k + 1) if ext[mm] != INF]
    if not betas:
        return TailBound(Fraction(10 ** 9), Fraction(0), M + 1)
    return TailBound(min(betas), Fraction(0), M + 1)


def required_order(m, vz, prec, limit=40):
    """Smallest M whose a-priori tail bound certifies precision prec at v(Z) = vz."""
    q = m.tower.q
    prec = Fraction(prec)
    b = coefficient_bounds(m, limit + 1)
    for M in range(limit):
        tb = tail_bound(m, b[:M + 1])
        if tb is None:
            continue
        floor = tb.term_floor(q, vz)
        if floor is not None and floor >= prec:
            return M
    raise TailNotConvergent(f"no order <= {limit} certifies t^{prec} at v(Z)={vz}")


@dataclass(frozen=True)
class ExpSeries:
    motive: MotiveSpec
    C: tuple
    M: int

    def bounds(self):
        return coefficient_bounds(self.motive, self.M, [min_valuation(c) for c in self.C])

    def tail(self):
        return tail_bound(self.motive, self.bounds())

    def entry_series(self, i, j):
        """The scalar additive series z -> (exp(z e_j))_i."""
        return AdditiveSeries([c[i][j] for c in self.C], self.tail())


def exp_series(m, M):
    """C_0..C_M from  C_m = (sum_i A_i C_{m-i}^(i)) / theta_{m0}."""
    if M < 0:
        raise ValueError("order must be >= 0")
    tower = m.tower
    C = [identity(tower, m.n)]
    for mm in range(1, M + 1):
        acc = zeros(tower, m.n)
        for i, Ai in enumerate(m.A, start=1):
            if mm - i < 0 or is_zero_matrix(Ai):
                continue
            prev = C[mm - i]
            if all(x.is_exact() and x.is_zero() for row in prev for x in row):
                continue
            acc = mat_add(acc, mat_mul(Ai, mat_twist(prev, i)))
        C.append(mat_scale(theta_diff(tower, mm, 0).inverse(), acc))
    return ExpSeries(m, tuple(C), M)


def _column_valuation(Z):
    return min((z.valuation() for z in Z), default=INF)


def exp_eval(E, Z, prec=None):
    """sum_m C_m Z^(m) with the tail certified below t^prec.

    prec defaults to the smallest absolute precision among the entries of Z
    shifted by their valuation, i.e. what Z itself supports.
    """
    tower = E.motive.tower
    n = E.motive.n
    if all(z.is_exact() and z.is_zero() for z in Z):
        return [PuiseuxNumber.zero(tower) for _ in range(n)]
    vz = _column_valuation(Z)
    if prec is None:
        prec = min(z.precision() for z in Z)
        if prec == INF:
            raise ValueError("exact input needs an explicit target precision")
    prec = Fraction(prec)
    tb = E.tail()
    if tb is None or (tb.term_floor(tower.q, vz) or -INF) < prec:
        raise TailNotConvergent(f"order {E.M} does not certify t^{prec} at v(Z)={vz}")
    q = tower.q
    out = [PuiseuxNumber.zero(tower) for _ in range(n)]
    for mm, Cm in enumerate(E.C):
        vc = min_valuation(Cm)
        if vc == INF or vc + q ** mm * vz >= prec:
            continue
        Zm = [frob_twist(z, mm, cap=prec - vc) for z in Z]
        for r in range(n):
            for c in range(n):
                a = Cm[r][c]
                if a.is_exact() and a.is_zero():
                    continue
                out[r] = out[r] + a * Zm[c]
    return [x.truncate(prec) for x in out]


def exp_at(m, Z, prec):
    """exp_M(Z) with the order chosen from the a-priori bound."""
    M = required_order(m, _column_valuation(Z), prec)
    return exp_eval(exp_series(m, M), Z, prec)


def check_functional_equation(E, Z, prec=None):
    """v(exp(theta Z) - T(exp Z)); +inf for Z = 0."""
    tower = E.motive.tower
    if all(z.is_exact() and z.is_zero() for z in Z):
        return INF
    th = PuiseuxNumber.theta(tower)
    if prec is None:
        prec = min(z.precision() for z in Z)
    prec = Fraction(prec)
    # T(exp Z) loses q^k * v(exp Z) through the twists; ask for enough of exp Z
    lhs = exp_eval(E, [th * z for z in Z], prec)
    ez = exp_eval(E, Z, _inner_precision(E.motive, Z, prec))
    rhs = t_action(E.motive, ez)
    diff = [a - b for a, b in zip(lhs, rhs)]
    return min(x.valuation() for x in diff)


def _inner_precision(m, Z, prec):
    # T(w) = theta w + sum A_i w^(i): need v(theta) + P' >= P and q^i P' + alpha_i >= P
    P = prec + 1
    for al in _alphas(m):
        if al != INF:
            P = max(P, prec - al)
    return P


def describe_motive(m):
    return {"n": m.n, "r": m.r, "k": m.k, "name": m.name,
            "rank_assumed": m.name in ("nonpure", "M(a)", "M_t(a)")}
