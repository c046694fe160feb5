"""The system Q X = X^(1) over C{T} for the basis (e_1, e_2, tau e_1), and its elimination."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ShapeError, ZeroParameter
from .puiseux import INF, PuiseuxNumber, frob_twist


@dataclass(frozen=True)
class ElimParams:
    a11: PuiseuxNumber
    a12: PuiseuxNumber
    a21: PuiseuxNumber

    @property
    def tower(self):
        return self.a21.tower

    @property
    def d(self):
        return self.a11 - self.a12 * self.a21

    def require_a21(self):
        if self.a21.is_zero():
            raise ZeroParameter("a21 must be nonzero")


class TSeries:
    """sum_n c_n T^n known modulo T^order."""

    def __init__(self, coeffs, order):
        self.order = order
        coeffs = list(coeffs)[:order]
        self.tower = coeffs[0].tower if coeffs else None
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, tower, order):
        return cls([PuiseuxNumber.zero(tower)] * order, order)

    def __getitem__(self, n):
        if n < len(self.coeffs):
            return self.coeffs[n]
        if n < self.order:
            return PuiseuxNumber.zero(self.tower)
        raise IndexError("beyond the T-order")

    def _pad(self):
        return [self[n] for n in range(self.order)]

    def __add__(self, other):
        N = min(self.order, other.order)
        return TSeries([self[n] + other[n] for n in range(N)], N)

    def __neg__(self):
        return TSeries([-c for c in self._pad()], self.order)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return TSeries([c * x for x in self._pad()], self.order)

    def times_T(self):
        z = PuiseuxNumber.zero(self.tower)
        return TSeries([z] + self._pad()[:-1], self.order)

    def times_poly(self, poly):
        """Multiply by a polynomial in T given as coefficients [p_0, p_1, ...]."""
        z = PuiseuxNumber.zero(self.tower)
        out = [z] * self.order
        for k, p in enumerate(poly):
            if p.is_exact() and p.is_zero():
                continue
            for n in range(self.order - k):
                out[n + k] = out[n + k] + p * self[n]
        return TSeries(out, self.order)

    def twist(self, j=1):
        return TSeries([frob_twist(c, j) for c in self._pad()], self.order)

    def untwist(self, j=1):
        return self.twist(-j)

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def valuation(self):
        """min over coefficients of v_inf (the precision for zeros)."""
        return min((c.valuation() for c in self._pad()), default=INF)

    def __eq__(self, other):
        return (self - other).is_zero()

    __hash__ = None


def _const(tower, x):
    return x if isinstance(x, PuiseuxNumber) else PuiseuxNumber.const(tower, x)


def _t_minus(tower, c):
    """The polynomial T - c."""
    return [-c, PuiseuxNumber.const(tower, 1)]


@dataclass(frozen=True)
class QMatrix:
    """3x3 matrix of polynomials in T (coefficient lists)."""

    entries: tuple
    params: ElimParams

    def apply(self, X):
        out = []
        for row in self.entries:
            acc = None
            for poly, Xj in zip(row, X):
                if all(p.is_exact() and p.is_zero() for p in poly):
                    continue
                term = Xj.times_poly(poly)
                acc = term if acc is None else acc + term
            out.append(acc if acc is not None else TSeries.zero(X[0].tower, X[0].order))
        return out

    def entry(self, i, j):
        return self.entries[i][j]


def build_Q(a11, a12, a21, tower=None):
    """tau f = Q f for f = (e_1, e_2, tau e_1)."""
    tower = tower or next(x.tower for x in (a11, a12, a21) if isinstance(x, PuiseuxNumber))
    p = ElimParams(_const(tower, a11), _const(tower, a12), _const(tower, a21))
    th = PuiseuxNumber.theta(tower)
    z = [PuiseuxNumber.zero(tower)]
    one = [PuiseuxNumber.const(tower, 1)]
    tm = _t_minus(tower, th)
    rows = (
        (z, z, one),
        (z, tm, [-p.a21]),
        (tm, [-p.a12 * c for c in tm], [-p.d]),
    )
    return QMatrix(rows, p)


def q_from_motive(m):
    """Q re-derived from T e = theta e + A_1 tau e + E_11 tau^2 e.

    Vectors over C[T] in the basis f are lists of three coefficient lists.
    """
    if m.n != 2 or m.k != 2:
        raise ShapeError("needs a dimension-2 motive with k = 2")
    tower = m.tower
    A1, A2 = m.A
    one = PuiseuxNumber.const(tower, 1)
    if not (A2[0][0] == 1 and all(A2[i][j].is_zero() for i, j in ((0, 1), (1, 0), (1, 1)))):
        raise ShapeError("A_2 must be E_11")
    if not (A1[1][1].is_exact() and A1[1][1] == 1):
        raise ShapeError("A_1 must have lower-right entry 1")
    th = PuiseuxNumber.theta(tower)
    z = PuiseuxNumber.zero(tower)

    def vec(*polys):
        return [list(p) for p in polys]

    def add(u, w):
        out = []
        for a, b in zip(u, w):
            n = max(len(a), len(b))
            out.append([(a[i] if i < len(a) else z) + (b[i] if i < len(b) else z) for i in range(n)])
        return out

    def scale(c, u):
        return [[c * x for x in p] for p in u]

    f1, f2, f3 = vec([one], [z], [z]), vec([z], [one], [z]), vec([z], [z], [one])
    T_minus = _t_minus(tower, th)

    def times_tm(u):
        out = []
        for p in u:
            r = [z] * (len(p) + 1)
            for i, c in enumerate(p):
                r[i] = r[i] + T_minus[0] * c
                r[i + 1] = r[i + 1] + T_minus[1] * c
            out.append(r)
        return out

    # row 2: T e2 = theta e2 + a21 tau e1 + tau e2
    tau_f2 = add(times_tm(f2), scale(-A1[1][0], f3))
    # row 1: T e1 = theta e1 + a11 tau e1 + a12 tau e2 + tau^2 e1
    tau_f3 = add(add(times_tm(f1), scale(-A1[0][0], f3)), scale(-A1[0][1], tau_f2))
    rows = (tuple(f3), tuple(tau_f2), tuple(tau_f3))
    p = ElimParams(A1[0][0], A1[0][1], A1[1][0])
    return QMatrix(tuple(tuple(_trim(poly) for poly in row) for row in rows), p)


def _trim(poly):
    poly = list(poly)
    while len(poly) > 1 and poly[-1].is_exact() and poly[-1].is_zero():
        poly.pop()
    return poly


def q_matrices_equal(Q1, Q2):
    for r1, r2 in zip(Q1.entries, Q2.entries):
        for p1, p2 in zip(r1, r2):
            n = max(len(p1), len(p2))
            z = PuiseuxNumber.zero((p1 or p2)[0].tower)
            for i in range(n):
                if not ((p1[i] if i < len(p1) else z) == (p2[i] if i < len(p2) else z)):
                    return False
    return True


def residual_system(Q, X):
    """The three residuals of Q X - X^(1)."""
    QX = Q.apply(X)
    return [qx - x.twist(1) for qx, x in zip(QX, X)]


def reconstruct(params, X2):
    """X_3 from the second equation, X_1 as its q-th root: both first residuals vanish."""
    params.require_a21()
    tower = params.tower
    th = PuiseuxNumber.theta(tower)
    inv = params.a21.inverse()
    X3 = (X2.times_poly(_t_minus(tower, th)) - X2.twist(1)).scale(inv)
    X1 = X3.untwist(1)
    return X1, X2, X3


def uv_reparam(a21, a11, a12):
    """(a21, u, v) with u = 1/a21 + a11^q/a21^q and v = d^q/a21^q + theta^(q^2)/a21^(q^2)."""
    if a21.is_zero():
        raise ZeroParameter("a21 must be nonzero")
    tower = a21.tower
    d = a11 - a12 * a21
    th = PuiseuxNumber.theta(tower)
    i1 = a21.inverse()
    iq = frob_twist(i1, 1)
    iq2 = frob_twist(i1, 2)
    u = i1 + frob_twist(a11, 1) * iq
    v = frob_twist(d, 1) * iq + frob_twist(th, 2) * iq2
    return a21, u, v


def u_two_forms(a21, a11, a12):
    """u computed two ways: 1/a21 + a12^q + d^q/a21^q and 1/a21 + a11^q/a21^q."""
    d = a11 - a12 * a21
    i1 = a21.inverse()
    iq = frob_twist(i1, 1)
    first = i1 + frob_twist(a12, 1) + frob_twist(d, 1) * iq
    second = i1 + frob_twist(a11, 1) * iq
    return first, second


def uv_inverse(a21, u, v):
    """(a21, a11, a12) from (a21, u, v), via q-th roots."""
    if a21.is_zero():
        raise ZeroParameter("a21 must be nonzero")
    tower = a21.tower
    th = PuiseuxNumber.theta(tower)
    i1 = a21.inverse()
    a11 = a21 * frob_twist(u - i1, -1)
    d = a21 * frob_twist(v - frob_twist(th, 2) * frob_twist(i1, 2), -1)
    a12 = (a11 - d) * i1
    return a21, a11, a12


def eliminated_residual(params, X2):
    """Left side of the single equation for X_2, written with u and v."""
    params.require_a21()
    tower = params.tower
    if X2.is_zero() and all(c.is_exact() for c in X2.coeffs):
        return TSeries.zero(tower, X2.order)
    th = PuiseuxNumber.theta(tower)
    _, u, v = uv_reparam(params.a21, params.a11, params.a12)
    i1 = params.a21.inverse()
    iq2 = frob_twist(i1, 2)
    thq = frob_twist(th, 1)
    t3 = X2.twist(3).scale(iq2)
    t2 = X2.twist(2).times_poly([v, -iq2])
    t1 = X2.twist(1).times_poly(_t_minus(tower, thq)).scale(u)
    t0 = X2.times_poly(_t_minus(tower, th)).times_poly(_t_minus(tower, thq)).scale(i1)
    return t3 + t2 - t1 + t0


def eliminated_residual_aij(params, X2):
    """The same left side with the coefficients written in a11, a12, a21, d."""
    params.require_a21()
    tower = params.tower
    th = PuiseuxNumber.theta(tower)
    a21, a12, d = params.a21, params.a12, params.d
    i1 = a21.inverse()
    iq = frob_twist(i1, 1)
    iq2 = frob_twist(i1, 2)
    thq, thq2 = frob_twist(th, 1), frob_twist(th, 2)
    c2 = [frob_twist(d, 1) * iq + thq2 * iq2, -iq2]
    c1 = i1 + frob_twist(a12, 1) + frob_twist(d, 1) * iq
    t3 = X2.twist(3).scale(iq2)
    t2 = X2.twist(2).times_poly(c2)
    t1 = X2.twist(1).times_poly(_t_minus(tower, thq)).scale(c1)
    t0 = X2.times_poly(_t_minus(tower, th)).times_poly(_t_minus(tower, thq)).scale(i1)
    return t3 + t2 - t1 + t0


@dataclass(frozen=True)
class ChainCheck:
    r1_zero: bool
    r2_zero: bool
    identity_holds: bool
    aij_form_agrees: bool
    identity_valuation: object

    @property
    def ok(self):
        return self.r1_zero and self.r2_zero and self.identity_holds and self.aij_form_agrees


def derivation_chain(params, X2):
    """Rebuild X from X_2, then check: residuals 1 and 2 vanish, and the twist of
    residual 3 equals the eliminated left side (in both parametrizations)."""
    Q = build_Q(params.a11, params.a12, params.a21)
    X = reconstruct(params, X2)
    r1, r2, r3 = residual_system(Q, list(X))
    elim = eliminated_residual(params, X2)
    diff = r3.twist(1) - elim
    return ChainCheck(r1.is_zero(), r2.is_zero(), diff.is_zero(),
                      (elim - eliminated_residual_aij(params, X2)).is_zero(), diff.valuation())
