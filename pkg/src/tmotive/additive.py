"""F_q-linear series f(z) = sum_m g_m z^(q^m) with certified tails."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import TailNotConvergent
from .puiseux import INF, PuiseuxNumber, frob_twist


@dataclass(frozen=True)
class TailBound:
    """v(g_m) >= slope * q^m + offset for every m >= start."""

    slope: Fraction
    offset: Fraction
    start: int

    def term_floor(self, q, vz):
        """Lower bound for v(g_m z^(q^m)) over all m >= start, or None if unbounded."""
        rate = self.slope + vz
        if rate <= 0:
            return None
        return q ** self.start * rate + self.offset


def tail_order(bound_at, q, vz, prec, start=1, limit=64):
    """Smallest M >= start - 1 such that bound_at(M + 1) certifies the tail at prec.

    bound_at(m) must return a TailBound valid from m on.
    """
    for M in range(start - 1, limit):
        floor = bound_at(M + 1).term_floor(q, vz)
        if floor is not None and floor >= prec:
            return M
    raise TailNotConvergent(f"no truncation order <= {limit} certifies t^{prec} at v(z)={vz}")


class AdditiveSeries:
    """Coefficients g_0..g_M plus a certified bound for the tail (None: exact polynomial)."""

    def __init__(self, coeffs, tail=None):
        self.coeffs = list(coeffs)
        self.tail = tail
        self.tower = self.coeffs[0].tower
        self.q = self.tower.q

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __getitem__(self, m):
        if m < len(self.coeffs):
            return self.coeffs[m]
        if self.tail is None:
            return PuiseuxNumber.zero(self.tower)
        raise IndexError(f"coefficient {m} is beyond the truncation order")

    def coefficient_floor(self, m):
        """Certified lower bound for v(g_m)."""
        if m < len(self.coeffs):
            return self.coeffs[m].valuation()
        if self.tail is None:
            return INF
        return self.tail.slope * self.q ** m + self.tail.offset

    def certify_tail(self, vz, prec):
        if self.tail is None or vz == INF:
            return True
        floor = self.tail.term_floor(self.q, vz)
        return floor is not None and floor >= prec

    def __call__(self, z, prec):
        return self.evaluate(z, prec)

    def evaluate(self, z, prec):
        """sum g_m z^(q^m) to absolute precision prec (or less if the data limit it)."""
        tower = self.tower
        prec = Fraction(prec)
        vz = z.valuation()
        if z.is_zero() and z.is_exact():
            return PuiseuxNumber.zero(tower)
        if not self.certify_tail(vz, prec):
            raise TailNotConvergent(
                f"order {self.order} does not certify t^{prec} at v(z)={vz}")
        acc = PuiseuxNumber.zero(tower)
        for m, g in enumerate(self.coeffs):
            if g.is_zero() and g.is_exact():
                continue
            if g.valuation() + self.q ** m * vz >= prec:
                continue
            zm = frob_twist(z, m, cap=prec - g.valuation())
            acc = acc + g * zm
        return acc.truncate(prec)

    def newton_polygon(self):
        """Lower convex hull of (q^m, v(g_m)) over the nonzero coefficients."""
        pts = [(self.q ** m, g.valuation()) for m, g in enumerate(self.coeffs) if not g.is_zero()]
        hull = []
        for pt in pts:
            while len(hull) >= 2:
                (x1, y1), (x2, y2) = hull[-2], hull[-1]
                if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                    hull.pop()
                else:
                    break
            hull.append(pt)
        return hull

    def compose(self, other, M=None):
        """self ∘ other truncated at order M (both must start with g_0 = 1 for a tail bound)."""
        M = min(self.order, other.order) if M is None else M
        tower = self.tower
        out = []
        for m in range(M + 1):
            acc = PuiseuxNumber.zero(tower)
            for i in range(m + 1):
                fi, gj = self[i], other[m - i]
                if (fi.is_zero() and fi.is_exact()) or (gj.is_zero() and gj.is_exact()):
                    continue
                acc = acc + fi * frob_twist(gj, i)
            out.append(acc)
        return AdditiveSeries(out, None if self.tail is None and other.tail is None else
                              _unknown_tail(M))

    def slope_floor(self):
        """s with v(g_i) >= s (q^i - 1) for every i >= 1."""
        q = self.q
        cands = []
        for i in range(1, len(self.coeffs)):
            g = self.coeffs[i]
            if g.is_zero() and g.is_exact():
                continue
            cands.append(g.valuation() / (q ** i - 1))
        if self.tail is not None:
            A, B, st = self.tail.slope, self.tail.offset, max(self.tail.start, 1)
            cands.append(A + min(Fraction(0), (A + B) / (q ** st - 1)))
        return min(cands, default=INF)


def _unknown_tail(M):
    # a composition's tail is not bounded here; refuse tail certificates
    return TailBound(Fraction(-10 ** 9), Fraction(0), M + 1)


def series_inverse(f, M=None):
    """Compositional inverse g of f (f ∘ g = id) to order M.

    The tail of g is certified by v(g_m) >= s (q^m - 1) where s is the
    slope floor of f, which holds for every m by induction on the
    coefficient recurrence.
    """
    if not (f[0] == 1):
        raise ValueError("series_inverse needs g_0 = 1")
    tower = f.tower
    M = f.order if M is None else M
    g = [PuiseuxNumber.const(tower, 1)]
    for m in range(1, M + 1):
        acc = PuiseuxNumber.zero(tower)
        for i in range(1, m + 1):
            fi = f[i]
            if fi.is_zero() and fi.is_exact():
                continue
            acc = acc + fi * frob_twist(g[m - i], i)
        g.append(-acc)
    s = f.slope_floor()
    tail = None if s == INF else TailBound(s, -s, M + 1)
    return AdditiveSeries(g, tail)
