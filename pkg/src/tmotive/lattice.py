"""Lattice bases, Siegel matrices and duality for rank-3 lattices in C_inf^2."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .analytic import carlitz2_exp, carlitz_exp, margin, periods, solve_additive
from .errors import (ContractionFailure, DivisionByZeroAtPrecision, InsufficientPrecision,
                     OutsideLogDomain, SingularHead)
from .motive import exp_at, exp_series, make_Ma, make_Mt, required_order
from .puiseux import PuiseuxNumber, parse, precision, r_infinity_rank


@dataclass(frozen=True)
class LatticeBasis:
    """Columns l_1..l_r of C_inf^n; the first n are the head."""

    n: int
    r: int
    columns: tuple
    tag: str = ""

    def head(self):
        return self.columns[:self.n]

    def tail(self):
        return self.columns[self.n:]

    def head_determinant(self):
        H = [[self.columns[j][i] for j in range(self.n)] for i in range(self.n)]
        return _det(H)

    def r_infinity_certificate(self):
        """(rank, certified precision, exact) of the columns over R_inf."""
        return r_infinity_rank([list(c) for c in self.columns])

    def is_lattice(self):
        d = self.head_determinant()
        rank, _, _ = self.r_infinity_certificate()
        return not d.is_zero() and rank == self.r

    def to_dict(self):
        return {"n": self.n, "r": self.r, "tag": self.tag,
                "columns": [[x.to_literal() for x in col] for col in self.columns]}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text, tower):
        d = json.loads(text)
        cols = tuple(tuple(parse(x, tower) for x in col) for col in d["columns"])
        return cls(d["n"], d["r"], cols, d.get("tag", ""))


@dataclass(frozen=True)
class SiegelMatrix:
    """(r-n) x n matrix S with (l_{n+1}, ..., l_r)^t = S (l_1, ..., l_n)^t."""

    entries: tuple

    @property
    def shape(self):
        return len(self.entries), len(self.entries[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def precision(self):
        return min(x.precision() for row in self.entries for x in row)

    def equals(self, other):
        return all(a == b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb))

    def to_dict(self):
        return {"entries": [[x.to_literal() for x in row] for row in self.entries],
                "precision": str(self.precision())}

    @classmethod
    def from_dict(cls, d, tower):
        return cls(tuple(tuple(parse(x, tower) for x in row) for row in d["entries"]))

    @classmethod
    def row(cls, *xs):
        return cls((tuple(xs),))


def _det(H):
    n = len(H)
    if n == 1:
        return H[0][0]
    if n == 2:
        return H[0][0] * H[1][1] - H[0][1] * H[1][0]
    acc = PuiseuxNumber.zero(H[0][0].tower)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in H[1:]]
        term = H[0][j] * _det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def _solve(H, b):
    """x with H x = b, Gaussian elimination pivoting on the smallest valuation."""
    n = len(H)
    A = [list(H[i]) + [b[i]] for i in range(n)]
    for col in range(n):
        cands = [i for i in range(col, n) if not A[i][col].is_zero()]
        if not cands:
            raise SingularHead("head columns are dependent at precision")
        p = min(cands, key=lambda i: A[i][col].valuation())
        A[col], A[p] = A[p], A[col]
        inv = A[col][col].inverse()
        A[col] = [x * inv for x in A[col]]
        for i in range(n):
            if i != col and not (A[i][col].is_exact() and A[i][col].is_zero()):
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[col])]
    return [A[i][n] for i in range(n)]


def siegel(basis):
    """S with l_{n+j} = sum_i S[j][i] l_i."""
    n = basis.n
    H = [[basis.columns[j][i] for j in range(n)] for i in range(n)]
    if basis.head_determinant().is_zero():
        raise SingularHead("head columns are dependent at precision")
    rows = []
    for col in basis.tail():
        try:
            rows.append(tuple(_solve(H, list(col))))
        except DivisionByZeroAtPrecision as e:
            raise SingularHead(str(e)) from e
    return SiegelMatrix(tuple(rows))


# -- duality -------------------------------------------------------------------------------

@dataclass(frozen=True)
class DualVerdict:
    exists: bool
    rank: int
    needed: int
    certified_precision: object
    exact: bool

    def __bool__(self):
        return self.exists

    def to_dict(self):
        return {"exists": self.exists, "rank": self.rank, "needed": self.needed,
                "certified_precision": str(self.certified_precision), "exact": self.exact}


def dual_exists(S, min_precision=None):
    """Whether S^t is the Siegel matrix of a lattice (R_inf-independence condition).

    S^t is (r-n') x n' with n' = r - n: its lattice in C^(r-n) is spanned by the
    unit vectors and the columns of S, which must be R_inf-independent.
    """
    rows, cols = S.shape
    tower = S[0, 0].tower
    one, zero = PuiseuxNumber.const(tower, 1), PuiseuxNumber.zero(tower)
    vecs = [[one if i == j else zero for i in range(rows)] for j in range(rows)]
    vecs += [[S[i, j] for i in range(rows)] for j in range(cols)]
    rank, cert, exact = r_infinity_rank(vecs, min_precision)
    needed = rows + cols
    return DualVerdict(rank == needed, rank, needed, cert, exact)


def is_siegel_of_lattice(S, min_precision=None):
    """R_inf-independence of the unit vectors and the rows of S (the lattice condition)."""
    rows, cols = S.shape
    tower = S[0, 0].tower
    one, zero = PuiseuxNumber.const(tower, 1), PuiseuxNumber.zero(tower)
    vecs = [[one if i == j else zero for i in range(cols)] for j in range(cols)]
    vecs += [list(S.entries[i]) for i in range(rows)]
    rank, cert, exact = r_infinity_rank(vecs, min_precision)
    return DualVerdict(rank == rows + cols, rank, rows + cols, cert, exact)


# -- kernels of block-triangular motives ---------------------------------------------------------

def triangular_kernel_solve(E, orientation, prec=32, per=None):
    """F_q[theta]-basis of ker exp for M(a) ('upper') or M_t(a) ('lower').

    The diagonal blocks are the Carlitz and rank-2 Carlitz exponentials, so
    one coordinate is a period and the other solves exp(z) = -(cross term)
    by the contraction z <- z - (exp(z) - w).
    """
    m = E.motive
    tower = m.tower
    q = tower.q
    prec = Fraction(prec)
    per = per or periods(q, prec + 2 * margin(q))
    pi1, pi2 = per.pi1, per.pi2
    om = PuiseuxNumber.const(tower, tower.omega)
    zero = PuiseuxNumber.zero(tower)
    with precision(prec + 2 * margin(q)):
        if orientation == "lower":
            cross = E.entry_series(1, 0)
            f = carlitz_exp(tower, -Fraction(q, q - 1), prec)
            cols = [(zero, pi1)]
            for z1 in (pi2, om * pi2):
                w = zero if _cross_vanishes(m, 1, 0) else -cross.evaluate(z1, prec)
                cols.append((z1, _solve_or_raise(f, w, prec, -Fraction(q, q - 1))))
            tag = "lower"
        elif orientation == "upper":
            cross = E.entry_series(0, 1)
            f = carlitz2_exp(tower, -Fraction(q * q, q * q - 1), prec)
            w = zero if _cross_vanishes(m, 0, 1) else -cross.evaluate(pi1, prec)
            z11 = _solve_or_raise(f, w, prec, -Fraction(q * q, q * q - 1))
            cols = [(z11, pi1), (pi2, zero), (om * pi2, zero)]
            tag = "upper"
        else:
            raise ValueError("orientation must be 'upper' or 'lower'")
    return LatticeBasis(2, 3, tuple(cols), f"{m.name}:{tag}")


def motive_lattice(kind, a, prec=24, per=None):
    """(motive, basis, S) for M(a) ('Ma') or M_t(a) ('Mt')."""
    if kind == "Ma":
        m, orientation = make_Ma(a), "upper"
    elif kind == "Mt":
        m, orientation = make_Mt(a), "lower"
    else:
        raise ValueError("kind must be 'Ma' or 'Mt'")
    q = m.tower.q
    work = Fraction(prec) + 2 * margin(q)
    with precision(work):
        E = exp_series(m, required_order(m, -Fraction(q * q, q * q - 1), work))
    basis = triangular_kernel_solve(E, orientation, prec, per)
    return m, basis, siegel(basis)


def _cross_vanishes(m, i, j):
    # with a triangular shape the (i, j) entries of every C_m stay exact zeros
    return all(A[i][j].is_exact() and A[i][j].is_zero() for A in m.A)


def _solve_or_raise(f, w, prec, edge):
    if w.is_zero() and w.is_exact():
        return PuiseuxNumber.zero(f.tower)
    if not w.is_zero() and w.valuation() <= edge:
        raise OutsideLogDomain(f"cross term has valuation {w.valuation()}, need > {edge}")
    try:
        return solve_additive(f, w, prec)
    except ContractionFailure as e:
        raise OutsideLogDomain(str(e)) from e


def kernel_residuals(m, basis, prec):
    """v(exp(l)) and v(exp(theta l)) for every column l (orders chosen per point)."""
    th = PuiseuxNumber.theta(m.tower)
    out = []
    for col in basis.columns:
        e1 = exp_at(m, list(col), prec)
        e2 = exp_at(m, [th * x for x in col], prec)
        out.append((min(x.valuation() for x in e1), min(x.valuation() for x in e2)))
    return out


# -- isomorphism of 1x2 Siegel matrices ------------------------------------------------------------

def polynomial_part(x):
    """The F_q[theta]-component of x: F_q-coordinate along 1 of the terms t^n, n <= 0."""
    tower = x.tower
    if x.precision() <= 0:
        raise InsufficientPrecision("the polynomial part needs precision above t^0")
    terms = {}
    for e, c in x.terms():
        if e <= 0 and e.denominator == 1:
            lam = int(tower.fq_coords[c.code][0])
            if lam:
                terms[e] = tower.element(lam)
    return PuiseuxNumber.from_terms(tower, terms)


def in_polynomial_ring(x):
    """Exactly in F_q[theta] (only decidable for exact inputs)."""
    if not x.is_exact():
        return False
    return (x - polynomial_part(x)).is_zero()


def _fraction_part(x):
    return x - polynomial_part(x)


def _gl2_fq(tower):
    fq = list(tower.fq_codes)
    mats = []
    for a, b, c, d in itertools.product(fq, repeat=4):
        det = tower.add_t[tower.mul_t[a, d], tower.neg_t[tower.mul_t[b, c]]]
        if det != 0:
            mats.append((a, b, c, d))
    return mats


def normal_forms(S):
    """All reductions of S under the implemented moves, in a fixed order.

    Moves: scaling l_3 by F_q^*, replacing the head by (l_1, l_2) g for
    g in GL_2(F_q) (which includes the swap), and translating the tail by
    F_q[theta]-combinations of the head.  The last move is applied by
    dropping polynomial parts.
    """
    tower = S[0, 0].tower
    s1, s2 = S[0, 0], S[0, 1]
    out = []
    for c in tower.fq_codes:
        if c == 0:
            continue
        cc = PuiseuxNumber.const(tower, tower.element(int(c)))
        for a, b, g, d in _gl2_fq(tower):
            # a head change by h sends the row s to s h^-t; g runs over all of GL_2(F_q)
            A, B, G, D = (PuiseuxNumber.const(tower, tower.element(int(v))) for v in (a, b, g, d))
            n1 = cc * (s1 * A + s2 * G)
            n2 = cc * (s1 * B + s2 * D)
            out.append((_fraction_part(n1), _fraction_part(n2)))
    return out


@dataclass(frozen=True)
class IsoVerdict:
    status: str
    certificate: dict = field(default_factory=dict)

    def __bool__(self):
        return self.status == "equal-after-normalization"

    def to_dict(self):
        return {"status": self.status, "certificate": self.certificate}


def _rational_dimension_bounds(S):
    """Bounds on dim over F_q(theta) of span(1, s1, s2)."""
    s = [S[0, 0], S[0, 1]]
    tower = s[0].tower
    one = PuiseuxNumber.const(tower, 1)
    try:
        lo, cert, _ = r_infinity_rank([one] + s)
    except InsufficientPrecision:
        lo, cert = 1, None
    hi = 1 + sum(0 if in_polynomial_ring(x) else 1 for x in s)
    return lo, hi, cert


def lattices_isomorphic_1x2(S1, S2):
    """Sufficient check for the isomorphism of the lattices with Siegel rows S1, S2.

    equal-after-normalization: some implemented move takes S1 to S2 at precision.
    distinct-at-precision: dim_{F_q(theta)} span(1, s1, s2) differs, which is
    an isomorphism invariant (it is 3 exactly when no line meets the lattice
    in rank 2); the lower bound is the certified R_inf-rank.
    """
    target = (_fraction_part(S2[0, 0]), _fraction_part(S2[0, 1]))
    for k, (n1, n2) in enumerate(normal_forms(S1)):
        if n1 == target[0] and n2 == target[1]:
            return IsoVerdict("equal-after-normalization",
                              {"move": k, "precision": str(min(S1.precision(), S2.precision()))})
    lo1, hi1, c1 = _rational_dimension_bounds(S1)
    lo2, hi2, c2 = _rational_dimension_bounds(S2)
    cert = {"dim_bounds_1": [lo1, hi1], "dim_bounds_2": [lo2, hi2],
            "rank_precision_1": str(c1), "rank_precision_2": str(c2)}
    if hi1 < lo2 or hi2 < lo1:
        return IsoVerdict("distinct-at-precision", cert)
    return IsoVerdict("inconclusive", cert)
