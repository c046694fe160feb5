"""Truncated Puiseux series in t = 1/theta over a FieldTower.

A PuiseuxNumber is  sum_i c_i t^((lo+i)/ram)  known modulo t^(prec/ram).
prec is None for exact values (finite sums).  v_inf(t) = 1, so the
valuation of a nonzero number is lo/ram and theta = t^-1 has valuation -1.

Precision is absolute and propagated pessimistically.  The only operations
that create new truncation are inversions of exact non-monomials, which
are carried out to the relative precision returned by working_precision().
"""
from __future__ import annotations

import contextlib
import contextvars
import math
import re
from fractions import Fraction

import numpy as np

from .errors import DivisionByZeroAtPrecision, InsufficientPrecision
from .scalars import FF

INF = math.inf

_EMPTY = np.zeros(0, dtype=np.int64)
_work_prec = contextvars.ContextVar("work_prec", default=Fraction(48))


def working_precision():
    """Relative precision (v_inf units) used when inverting exact values."""
    return _work_prec.get()


@contextlib.contextmanager
def precision(rel):
    token = _work_prec.set(Fraction(rel))
    try:
        yield
    finally:
        _work_prec.reset(token)


def _ceil_units(v, ram):
    return math.ceil(Fraction(v) * ram)


class PuiseuxNumber:
    __slots__ = ("tower", "ram", "lo", "coeffs", "prec")

    def __init__(self, tower, ram, lo, coeffs, prec):
        # raw constructor; use _build for normalization
        self.tower = tower
        self.ram = ram
        self.lo = lo
        self.coeffs = coeffs
        self.prec = prec

    # -- construction --------------------------------------------------------

    @classmethod
    def zero(cls, tower, prec=None):
        """Exact zero, or zero known to absolute precision prec."""
        if prec is None:
            return cls(tower, 1, 0, _EMPTY, None)
        prec = Fraction(prec)
        return _build(tower, prec.denominator, 0, _EMPTY, prec.numerator)

    @classmethod
    def const(cls, tower, c):
        code = tower.to_code(c)
        return _build(tower, 1, 0, np.array([code], dtype=np.int64), None)

    @classmethod
    def monomial(cls, tower, c, exponent):
        """c * t^exponent (exponent rational, in v_inf units)."""
        exponent = Fraction(exponent)
        code = tower.to_code(c)
        return _build(tower, exponent.denominator, exponent.numerator,
                      np.array([code], dtype=np.int64), None)

    @classmethod
    def theta(cls, tower):
        return cls.monomial(tower, 1, -1)

    @classmethod
    def from_terms(cls, tower, terms, prec=None):
        """Build from a mapping {exponent: coefficient}."""
        terms = {Fraction(k): tower.to_code(v) for k, v in terms.items()}
        if prec is not None:
            prec = Fraction(prec)
        dens = [k.denominator for k in terms] + ([prec.denominator] if prec is not None else [])
        ram = math.lcm(*dens) if dens else 1
        if not terms:
            return cls.zero(tower, prec)
        exps = {int(k * ram): v for k, v in terms.items()}
        lo = min(exps)
        arr = np.zeros(max(exps) - lo + 1, dtype=np.int64)
        for n, v in exps.items():
            arr[n - lo] = v
        return _build(tower, ram, lo, arr, None if prec is None else int(prec * ram))

    def _coerce(self, y):
        if isinstance(y, PuiseuxNumber):
            if y.tower is not self.tower:
                raise ValueError("numbers over different towers")
            return y
        if isinstance(y, (int, np.integer, FF)):
            return PuiseuxNumber.const(self.tower, y)
        raise TypeError(f"cannot combine PuiseuxNumber with {type(y).__name__}")

    # -- inspection ------------------------------------------------------------

    def is_exact(self):
        return self.prec is None

    def is_zero(self):
        """Zero at the available precision (includes exact zero)."""
        return len(self.coeffs) == 0

    def zero_state(self):
        if len(self.coeffs):
            return "nonzero"
        return "exact_zero" if self.prec is None else "zero_at_precision"

    def valuation(self):
        """v_inf as a Fraction; for zero, the precision bound (inf if exact)."""
        if len(self.coeffs):
            return Fraction(self.lo, self.ram)
        return self.precision()

    def precision(self):
        return INF if self.prec is None else Fraction(self.prec, self.ram)

    def leading_coefficient(self):
        if not len(self.coeffs):
            raise InsufficientPrecision("zero at precision has no leading term")
        return FF(self.tower, self.coeffs[0])

    def terms(self):
        """List of (exponent, FF) for the nonzero stored terms."""
        idx = np.flatnonzero(self.coeffs)
        return [(Fraction(self.lo + int(i), self.ram), FF(self.tower, self.coeffs[i]))
                for i in idx]

    def coefficient(self, exponent):
        exponent = Fraction(exponent)
        if self.prec is not None and exponent >= self.precision():
            raise InsufficientPrecision(f"t^{exponent} is beyond the precision")
        n = exponent * self.ram
        if n.denominator != 1:
            return FF(self.tower, 0)
        i = int(n) - self.lo
        if 0 <= i < len(self.coeffs):
            return FF(self.tower, self.coeffs[i])
        return FF(self.tower, 0)

    def relative_precision(self):
        return self.precision() - self.valuation()

    # -- arithmetic ----------------------------------------------------------------

    def __add__(self, y):
        return _add(self, self._coerce(y))

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxNumber(self.tower, self.ram, self.lo, self.tower.neg_t[self.coeffs], self.prec)

    def __sub__(self, y):
        return _add(self, -self._coerce(y))

    def __rsub__(self, y):
        return _add(self._coerce(y), -self)

    def __mul__(self, y):
        return _mul(self, self._coerce(y))

    __rmul__ = __mul__

    def inverse(self):
        return _inv(self)

    def __truediv__(self, y):
        return _mul(self, _inv(self._coerce(y)))

    def __rtruediv__(self, y):
        return _mul(self._coerce(y), _inv(self))

    def __pow__(self, e):
        if e < 0:
            return _inv(self) ** (-e)
        result = PuiseuxNumber.const(self.tower, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, y):
        try:
            y = self._coerce(y)
        except (TypeError, ValueError):
            return NotImplemented
        return (self - y).is_zero()

    __hash__ = None

    def truncate(self, prec):
        """Forget everything at or beyond t^prec."""
        if prec == INF:
            return self
        prec = Fraction(prec)
        ram = math.lcm(self.ram, prec.denominator)
        lo, c, p = _lift(self, ram)
        new = int(prec * ram)
        if p is not None:
            new = min(new, p)
        return _build(self.tower, ram, lo, c, new)

    def frob_twist(self, j=1, cap=None):
        return frob_twist(self, j, cap)

    # -- text ------------------------------------------------------------------------

    def to_literal(self):
        t = self.tower
        parts = []
        for i in np.flatnonzero(self.coeffs):
            c = FF(t, self.coeffs[i]).to_literal()
            parts.append(f"{c}*t^({self.lo + int(i)}/{self.ram})")
        if self.prec is not None:
            parts.append(f"O(t^({self.prec}/{self.ram}))")
        return " + ".join(parts) if parts else "0"

    def __str__(self):
        return self.to_literal()

    def __repr__(self):
        head = self.terms()[:3]
        body = " + ".join(f"{c}*t^({e})" for e, c in head) or "0"
        if len(self.terms()) > 3:
            body += " + ..."
        if self.prec is not None:
            body += f" + O(t^({self.precision()}))"
        return f"<Puiseux {body}>"


def parse(text, tower):
    """Inverse of PuiseuxNumber.to_literal (bit-exact, ramification included)."""
    text = text.strip()
    if text == "0":
        return PuiseuxNumber.zero(tower)
    terms = []
    prec = None
    ram = None
    for part in (s.strip() for s in text.split(" + ")):
        m = re.fullmatch(r"O\(t\^\((-?\d+)/(\d+)\)\)", part)
        if m:
            prec, r = int(m.group(1)), int(m.group(2))
            ram = ram or r
            if r != ram:
                raise ValueError("inconsistent ramification in literal")
            continue
        m = re.fullmatch(r"(F\d+:\[[^\]]*\])\*t\^\((-?\d+)/(\d+)\)", part)
        if not m:
            raise ValueError(f"bad term {part!r}")
        r = int(m.group(3))
        ram = ram or r
        if r != ram:
            raise ValueError("inconsistent ramification in literal")
        terms.append((int(m.group(2)), tower.parse_element(m.group(1)).code))
    if not terms:
        return PuiseuxNumber(tower, ram, 0, _EMPTY, prec)
    lo = min(n for n, _ in terms)
    arr = np.zeros(max(n for n, _ in terms) - lo + 1, dtype=np.int64)
    for n, c in terms:
        arr[n - lo] = c
    return PuiseuxNumber(tower, ram, lo, arr, prec)


def _build(tower, ram, lo, coeffs, prec):
    if prec is not None and len(coeffs) > prec - lo:
        coeffs = coeffs[:max(prec - lo, 0)]
    nz = np.flatnonzero(coeffs)
    if nz.size == 0:
        if prec is None:
            return PuiseuxNumber(tower, 1, 0, _EMPTY, None)
        g = math.gcd(ram, prec)
        return PuiseuxNumber(tower, ram // g, 0, _EMPTY, prec // g)
    first = int(nz[0])
    coeffs = coeffs[first:int(nz[-1]) + 1]
    lo += first
    g = math.gcd(ram, lo)
    if g > 1 and nz.size > 1:
        g = math.gcd(g, int(np.gcd.reduce(nz[1:] - first)))
    if g > 1 and prec is not None:
        g = math.gcd(g, prec)
    if g > 1:
        coeffs = coeffs[::g]
        lo //= g
        ram //= g
        if prec is not None:
            prec //= g
    return PuiseuxNumber(tower, ram, lo, coeffs, prec)


def _lift(x, E):
    """(lo, coeffs, prec) of x expressed with ramification E (a multiple of x.ram)."""
    s = E // x.ram
    if s == 1:
        return x.lo, x.coeffs, x.prec
    c = x.coeffs
    if len(c):
        arr = np.zeros((len(c) - 1) * s + 1, dtype=np.int64)
        arr[::s] = c
    else:
        arr = c
    return x.lo * s, arr, None if x.prec is None else x.prec * s


def _minp(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _add(x, y):
    if x.prec is None and not len(x.coeffs):
        return y
    if y.prec is None and not len(y.coeffs):
        return x
    t = x.tower
    E = math.lcm(x.ram, y.ram)
    lx, cx, px = _lift(x, E)
    ly, cy, py = _lift(y, E)
    P = _minp(px, py)
    parts = [(l, c) for l, c in ((lx, cx), (ly, cy)) if len(c)]
    if not parts:
        return _build(t, E, 0, _EMPTY, P)
    lo = min(l for l, _ in parts)
    hi = max(l + len(c) for l, c in parts)
    if P is not None:
        hi = min(hi, P)
    if hi <= lo:
        return _build(t, E, 0, _EMPTY, P)
    out = np.zeros(hi - lo, dtype=np.int64)
    for l, c in parts:
        c = c[:max(hi - l, 0)]
        seg = slice(l - lo, l - lo + len(c))
        out[seg] = t.vadd(out[seg], c)
    return _build(t, E, lo, out, P)


def _val_units(lo, c, p):
    return lo if len(c) else p


def _mul(x, y):
    t = x.tower
    if (x.prec is None and not len(x.coeffs)) or (y.prec is None and not len(y.coeffs)):
        return PuiseuxNumber.zero(t)
    E = math.lcm(x.ram, y.ram)
    lx, cx, px = _lift(x, E)
    ly, cy, py = _lift(y, E)
    vx, vy = _val_units(lx, cx, px), _val_units(ly, cy, py)
    if not len(cx) or not len(cy):
        return _build(t, E, 0, _EMPTY, vx + vy)
    P = _minp(None if px is None else px + vy, None if py is None else py + vx)
    if P is None:
        out = t.conv(cx, cy)
    else:
        L = P - vx - vy
        if L <= 0:
            return _build(t, E, 0, _EMPTY, P)
        out = t.conv(cx, cy, L)
    return _build(t, E, vx + vy, out, P)


def _inv(x):
    t = x.tower
    if not len(x.coeffs):
        raise DivisionByZeroAtPrecision(f"cannot invert {x!r}")
    if x.prec is None and len(x.coeffs) == 1:
        return PuiseuxNumber(t, x.ram, -x.lo, t.inv_t[x.coeffs], None)
    if x.prec is None:
        rel = _ceil_units(working_precision(), x.ram)
    else:
        rel = x.prec - x.lo
    g = t.series_inv(x.coeffs, rel)
    return _build(t, x.ram, -x.lo, g, rel - x.lo)


def frob_twist(x, j=1, cap=None):
    """x^(q^j): coefficient-wise Frobenius and exponents scaled by q^j.

    Negative j takes the unique q^|j|-th root.  cap (an absolute valuation)
    drops everything at or beyond t^cap.
    """
    t = x.tower
    if j == 0:
        return x if cap is None else x.truncate(cap)
    codes = t.frob_table(j)[x.coeffs]
    if j < 0:
        Q = t.q ** (-j)
        y = _build(t, x.ram * Q, x.lo, codes, x.prec)
        return y if cap is None else y.truncate(cap)
    Q = t.q ** j
    g = math.gcd(Q, x.ram)
    ram, stride = x.ram // g, Q // g
    prec = None if x.prec is None else x.prec * stride
    lo = x.lo * stride
    if cap is not None and cap != INF:
        capu = _ceil_units(cap, ram)
        prec = capu if prec is None else min(prec, capu)
    if len(codes):
        if prec is not None:
            keep = max(0, -((lo - prec) // stride))
            codes = codes[:keep]
        if len(codes):
            arr = np.zeros((len(codes) - 1) * stride + 1, dtype=np.int64)
            arr[::stride] = codes
            codes = arr
    return _build(t, ram, lo, codes, prec)


def theta_diff(tower, i, j):
    """theta^(q^i) - theta^(q^j), exact."""
    if not i > j >= 0:
        raise ValueError("need i > j >= 0")
    th = PuiseuxNumber.theta(tower)
    return frob_twist(th, i) - frob_twist(th, j)


def r_infinity_vector(x, ram):
    """Coordinates of x over R_inf = F_q((t)) along the basis beta_b * t^(j/ram).

    Returns a list of ram*k PuiseuxNumbers of ramification 1 with F_q
    coefficients, ordered by (j, b).
    """
    t = x.tower
    if ram % x.ram:
        raise ValueError("ram must be a multiple of the number's ramification")
    lo, c, p = _lift(x, ram)
    out = []
    for j in range(ram):
        # exponents n = lo + i with n % ram == j
        first = (j - lo) % ram
        sub = c[first::ram]
        m0 = (lo + first - j) // ram
        sp = None if p is None else -((j - p) // ram)
        fq = t.fq_coords[sub] if len(sub) else np.zeros((0, t.k), dtype=np.int64)
        for b in range(t.k):
            out.append(_build(t, 1, m0, fq[:, b].copy(), sp))
    return out


def r_infinity_rank(xs, min_precision=None):
    """Rank over R_inf of the elements (or vectors) xs, with a certificate.

    Each element may be a PuiseuxNumber or a sequence of them (a vector in
    C_inf^n, whose coordinate decompositions are concatenated).  Returns
    (rank, certified_precision, exact) where exact is True when every
    non-pivot row reduced to an exact zero.  Zero-at-precision residues count
    as zero; the certificate records the precision at which they vanish.
    """
    rows = [list(x) if isinstance(x, (list, tuple)) else [x] for x in xs]
    if not rows:
        return 0, INF, True
    flat = [v for r in rows for v in r]
    ram = math.lcm(*(v.ram for v in flat))
    mat = [[c for v in r for c in r_infinity_vector(v, ram)] for r in rows]
    floor = min((v.valuation() for v in flat if not v.is_zero()), default=INF)
    rank, cert, exact = _fraction_free_rank(mat)
    if min_precision is not None and cert < min_precision:
        raise InsufficientPrecision(
            f"rank decision only certified to t^{cert}, need t^{min_precision}")
    if cert != INF and cert <= floor:
        raise InsufficientPrecision("residues are not known beyond the inputs' leading terms")
    return rank, cert, exact


def _fraction_free_rank(mat):
    rows = [r[:] for r in mat]
    ncols = len(rows[0]) if rows else 0
    rank = 0
    used = [False] * len(rows)
    scale = [Fraction(0)] * len(rows)
    for col in range(ncols):
        best = None
        for i, r in enumerate(rows):
            if used[i] or r[col].is_zero():
                continue
            if best is None or r[col].valuation() < rows[best][col].valuation():
                best = i
        if best is None:
            continue
        used[best] = True
        rank += 1
        piv = rows[best]
        for i, r in enumerate(rows):
            if used[i] or r[col].is_zero() and r[col].is_exact():
                continue
            f = r[col]
            rows[i] = [piv[col] * a - f * b for a, b in zip(r, piv)]
            scale[i] += piv[col].valuation()
    cert, exact = INF, True
    for i, r in enumerate(rows):
        if used[i]:
            continue
        for v in r:
            if not v.is_exact():
                exact = False
                cert = min(cert, v.precision() - scale[i])
    return rank, cert, exact
