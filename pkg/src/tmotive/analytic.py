"""Periods, kernel elements and the Siegel-series map s(a).

Every value is computed to an absolute target precision P.  Internally the
working precision for inversions is raised by a margin so that the
outputs actually reach P; callers can read the achieved precision from
the returned numbers.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

from .additive import AdditiveSeries, series_inverse
from .errors import (ContractionFailure, InsufficientPrecision, NoSuchSlope,
                     OutsideLogDomain, OutsideNeighborhood, TailNotConvergent)
from .motive import (exp_eval, exp_series, make_carlitz, make_carlitz2, make_Mt,
                     required_order)
from .puiseux import INF, PuiseuxNumber, frob_twist, precision, theta_diff
from .scalars import FF, tower as get_tower

__all__ = [
    "AdditiveSeries", "series_inverse", "kernel_generator", "solve_additive",
    "PeriodData", "periods", "carlitz_exp", "carlitz_log", "carlitz2_exp",
    "carlitz_lattice_check", "DSeries", "d_series", "siegel_s", "siegel_s_details",
    "local_inverse_s", "s_leading_coefficient", "neighborhood_radius", "dfrak",
    "delta_coefficients", "dfrak_valuation", "log_domain",
]


def margin(q):
    return Fraction(4 * q * q + 8)


# -- scalar exponentials ---------------------------------------------------------

def _scalar_exp(m, vz, prec):
    M = required_order(m, vz, prec)
    return exp_series(m, M).entry_series(0, 0)


def carlitz_exp(tower, vz, prec):
    """exp of the Carlitz module, with an order certified at v(z) >= vz."""
    return _scalar_exp(make_carlitz(tower), vz, prec)


def carlitz2_exp(tower, vz, prec):
    return _scalar_exp(make_carlitz2(tower), vz, prec)


def carlitz_log(tower, vw, prec):
    """log of the Carlitz module to an order certified at v(w) >= vw.

    Raises OutsideLogDomain unless vw > -q/(q-1).
    """
    q = tower.q
    s = Fraction(q, q - 1)
    if vw <= -s:
        raise OutsideLogDomain(f"log needs v(w) > {-s}, got {vw}")
    M = 1
    while q ** (M + 1) * (s + vw) - s < prec:
        M += 1
    E = exp_series(make_carlitz(tower), M).entry_series(0, 0)
    g = series_inverse(E, M)
    if not g.certify_tail(vw, prec):
        raise TailNotConvergent(f"log order {M} does not certify t^{prec}")
    return g


# -- kernel elements -----------------------------------------------------------------

def _segments(f):
    hull = f.newton_polygon()
    return [(hull[i], hull[i + 1]) for i in range(len(hull) - 1)]


def _leading_root(f, seg, rho):
    """First nonzero alpha (enumeration order) with sum lc(g_m) alpha^(q^m) = 0 over the segment."""
    tower = f.tower
    q = tower.q
    (x1, y1), _ = seg
    level = y1 + x1 * rho
    on = []
    for m, g in enumerate(f.coeffs):
        if g.is_zero():
            continue
        if g.valuation() + q ** m * rho == level:
            on.append((m, g.leading_coefficient().code))
    mul, add = tower.mul_t, tower.add_t
    for code in range(1, tower.size):
        acc = 0
        for m, c in on:
            acc = add[acc, mul[c, tower.frob_t[m % tower.k][code]]]
        if acc == 0:
            return FF(tower, code)
    raise NoSuchSlope(f"leading coefficient equation has no root in {tower!r}")


def kernel_generator(f, slope_target=None, prec=None, max_steps=200):
    """Nonzero z with f(z) = 0 to precision prec, of valuation slope_target.

    The leading term comes from a Newton-polygon segment of f; the rest from
    the iteration z <- z - f(z), whose error valuation must strictly increase.
    """
    segs = _segments(f)
    if not segs:
        raise NoSuchSlope("the series has no Newton-polygon segment (trivial kernel)")
    chosen = None
    for seg in segs:
        (x1, y1), (x2, y2) = seg
        rho = -Fraction(y2 - y1) / (x2 - x1)
        if slope_target is None or rho == Fraction(slope_target):
            chosen = (seg, rho)
            break
    if chosen is None:
        raise NoSuchSlope(f"no segment gives root valuation {slope_target}")
    seg, rho = chosen
    if prec is None:
        from .puiseux import working_precision
        prec = working_precision() + min(rho, 0) - 1
    prec = Fraction(prec)
    alpha = _leading_root(f, seg, rho)
    z = PuiseuxNumber.monomial(f.tower, alpha, rho)
    last = rho
    for step in range(max_steps):
        r = f.evaluate(z, prec)
        err = r.valuation()
        if r.is_zero():
            if r.precision() < prec:
                raise InsufficientPrecision(
                    f"residual only known to t^{r.precision()}, wanted t^{prec}")
            return z.truncate(prec)
        if err <= last:
            raise ContractionFailure(
                f"step {step}: error valuation {err} did not increase past {last}")
        last = err
        z = (z - r).truncate(prec)
    raise ContractionFailure(f"no convergence after {max_steps} steps (error t^{last})")


def solve_additive(f, w, prec, max_steps=200):
    """z with f(z) = w to precision prec, by z <- z - (f(z) - w) from z = w.

    Contracts when v(w) exceeds the root valuation of the first Newton-polygon
    segment of f; otherwise ContractionFailure.
    """
    prec = Fraction(prec)
    if w.is_zero() and w.is_exact():
        return PuiseuxNumber.zero(f.tower)
    segs = _segments(f)
    if segs:
        (x1, y1), (x2, y2) = segs[0]
        rho = -Fraction(y2 - y1) / (x2 - x1)
        if w.valuation() <= rho:
            raise ContractionFailure(
                f"v(w) = {w.valuation()} is not above the root valuation {rho}")
    z = w
    last = -INF
    for step in range(max_steps):
        r = f.evaluate(z, prec) - w
        if r.is_zero():
            if r.precision() < prec:
                raise InsufficientPrecision(
                    f"residual only known to t^{r.precision()}, wanted t^{prec}")
            return z.truncate(prec)
        err = r.valuation()
        if err <= last:
            raise ContractionFailure(f"step {step}: error valuation stalled at {err}")
        last = err
        z = (z - r).truncate(prec)
    raise ContractionFailure(f"no convergence after {max_steps} steps")


# -- periods ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodData:
    q: int
    prec: Fraction
    pi1: PuiseuxNumber
    pi2: PuiseuxNumber
    residual1: Fraction
    residual2: Fraction

    @property
    def tower(self):
        return self.pi1.tower

    @property
    def omega(self):
        return self.tower.omega


_period_cache = {}
_period_lock = threading.Lock()


def periods(q=2, prec=64):
    """pi_1, pi_2 to absolute precision prec (cached per (q, prec))."""
    key = (q, Fraction(prec))
    hit = _period_cache.get(key)
    if hit is not None:
        return hit
    with _period_lock:
        hit = _period_cache.get(key)
        if hit is None:
            hit = _compute_periods(q, Fraction(prec))
            _period_cache[key] = hit
    return hit


def _compute_periods(q, prec):
    tower = get_tower(q)
    rho1 = -Fraction(q, q - 1)
    rho2 = -Fraction(q * q, q * q - 1)
    with precision(prec + margin(q)):
        inner = prec + 4
        f1 = carlitz_exp(tower, rho1, inner)
        pi1 = kernel_generator(f1, rho1, inner)
        f2 = carlitz2_exp(tower, rho2, inner)
        pi2 = kernel_generator(f2, rho2, inner)
        r1 = f1.evaluate(pi1, prec).valuation()
        r2 = f2.evaluate(pi2, prec).valuation()
    return PeriodData(q, prec, pi1, pi2, r1, r2)


def carlitz_lattice_check(z, prec=None, per=None):
    """True iff exp_C(z) = 0 at precision and exp_C(theta z), exp_C((theta+1) z) vanish too.

    The multiples are checked through T(exp z) = exp(theta z), i.e. using
    the Carlitz action on exp(z), and also by direct evaluation.
    """
    tower = z.tower
    q = tower.q
    if prec is None:
        prec = z.precision() - 2 * q
        if prec == INF:
            prec = Fraction(32)
    th = PuiseuxNumber.theta(tower)
    vz = z.valuation() if not z.is_zero() else Fraction(0)
    with precision(prec + margin(q) + 2 * q):
        f = carlitz_exp(tower, vz - 1, prec)
        e = f.evaluate(z, prec + q)
        if not e.is_zero():
            return False
        for mult in (th, th + 1):
            # T-action: exp((theta + c) z) = theta e + e^q + c e
            via_t = (mult * e + frob_twist(e, 1)).truncate(prec)
            direct = f.evaluate(mult * z, prec)
            if not via_t.is_zero() or not direct.is_zero():
                return False
    return True


# -- the series D(a), D_omega(a) --------------------------------------------------------

@dataclass(frozen=True)
class DSeries:
    a: PuiseuxNumber
    D: PuiseuxNumber
    D_omega: PuiseuxNumber
    dfrak: tuple
    agreement: Fraction
    agreement_omega: Fraction

    @property
    def consistent(self):
        return self.agreement >= self.D.precision() and self.agreement_omega >= self.D_omega.precision()


def delta_coefficients(tower, m_max):
    """delta[m][i] with d_m(a) = sum_i delta[m][i] a^(q^i), m <= m_max."""
    c2 = {0: PuiseuxNumber.const(tower, 1)}
    for j in range(2, m_max + 1, 2):
        c = PuiseuxNumber.const(tower, 1)
        for i in range(0, j, 2):
            c = c / theta_diff(tower, j, i)
        c2[j] = c
    delta = [dict()]
    for m in range(1, m_max + 1):
        inv = theta_diff(tower, m, 0).inverse()
        row = {}
        if m % 2 == 1:
            row[0] = frob_twist(c2[m - 1], 1) * inv
        for i, x in delta[m - 1].items():
            row[i + 1] = frob_twist(x, 1) * inv
        delta.append(row)
    return delta


def delta_valuation(q, m, i):
    """Exact v(delta_{m,i}) = q^m (m + i + 1) / 2 (every factor has exact valuation)."""
    return Fraction(q ** m * (m + i + 1), 2)


def dfrak_valuation(q, i):
    """v(dfrak_i): the m = i + 1 term strictly dominates."""
    return q ** (i + 1) * (i + 1 - Fraction(q * q, q * q - 1))


def _dfrak_range(q, vpi, i, prec):
    ms = []
    m = i + 1
    while True:
        v = delta_valuation(q, m, i) + q ** m * vpi
        if ms and v >= prec and v > 0:
            return ms
        ms.append(m)
        m += 2


def dfrak(per, i, prec, delta=None):
    """dfrak_i = sum over m = i+1, i+3, ... of delta_{m,i} pi_2^(q^m)."""
    tower = per.tower
    ms = _dfrak_range(tower.q, per.pi2.valuation(), i, prec)
    delta = delta or delta_coefficients(tower, max(ms))
    acc = PuiseuxNumber.zero(tower)
    for m in ms:
        acc = acc + delta[m][i] * frob_twist(per.pi2, m)
    return acc.truncate(prec)


def d_series(a, prec=48, per=None):
    """D(a), D_omega(a) from the exponential of M_t(a), plus dfrak_0, dfrak_1, ...

    The grouped sums  sum_i dfrak_i a^(q^i)  and  sum_i w_i dfrak_i a^(q^i)
    (w_i = omega for odd i, omega^q for even i) are computed independently;
    the valuations of their differences from D, D_omega are kept in
    `agreement`, `agreement_omega`.
    """
    tower = a.tower
    q = tower.q
    prec = Fraction(prec)
    per = per or periods(q, prec + margin(q))
    pi2 = per.pi2
    vpi = pi2.valuation()
    zero = PuiseuxNumber.zero(tower)
    if a.is_zero() and a.is_exact():
        return DSeries(a, zero, zero, (), INF, INF)
    va = a.valuation()
    om = tower.omega
    om_c = PuiseuxNumber.const(tower, om)
    with precision(prec + margin(q) + max(0, -va) * q * q):
        m = make_Mt(a, tower)
        E = exp_series(m, required_order(m, vpi, prec))
        D = exp_eval(E, [pi2, zero], prec)[1]
        D_om = exp_eval(E, [om_c * pi2, zero], prec)[1]

        terms = []
        i = 0
        while True:
            lead = q * (i + 1 + vpi) + va
            if i > 0 and lead > 0 and q ** i * lead >= prec:
                break
            terms.append(i)
            i += 1
            if i > 64:
                raise TailNotConvergent("dfrak expansion does not terminate")
        precs = {i: prec - min(va, 0) * q ** i for i in terms}
        ms_max = max(max(_dfrak_range(q, vpi, i, precs[i])) for i in terms)
        delta = delta_coefficients(tower, ms_max)
        dfr = [dfrak(per, i, precs[i], delta) for i in terms]
        total = zero
        total_om = zero
        for i, di in zip(terms, dfr):
            ai = frob_twist(a, i)
            w = om if i % 2 == 1 else om ** q
            total = total + di * ai
            total_om = total_om + PuiseuxNumber.const(tower, w) * di * ai
    agree = (D - total).valuation()
    agree_om = (D_om - total_om).valuation()
    return DSeries(a, D, D_om, tuple(dfr), agree, agree_om)


# -- the Siegel-series map -----------------------------------------------------------------

@dataclass(frozen=True)
class SiegelSeriesValue:
    a: PuiseuxNumber
    s: PuiseuxNumber
    z22: PuiseuxNumber
    z32: PuiseuxNumber
    D: PuiseuxNumber
    D_omega: PuiseuxNumber


def log_domain(q):
    return -Fraction(q, q - 1)


def siegel_s_details(a, prec=32, per=None):
    tower = a.tower
    q = tower.q
    prec = Fraction(prec)
    per = per or periods(q, prec + 2 * margin(q))
    zero = PuiseuxNumber.zero(tower)
    if a.is_zero() and a.is_exact():
        return SiegelSeriesValue(a, zero, zero, zero, zero, zero)
    inner = prec + 2 * margin(q)
    ds = d_series(a, inner, per)
    bound = log_domain(q)
    for name, w in (("D(a)", ds.D), ("D_omega(a)", ds.D_omega)):
        if not w.is_zero() and w.valuation() <= bound:
            raise OutsideLogDomain(
                f"v({name}) = {w.valuation()} must exceed {bound} for log to converge")
    vw = min(ds.D.valuation(), ds.D_omega.valuation())
    with precision(inner + margin(q)):
        g = carlitz_log(tower, vw, inner)
        z22 = g.evaluate(-ds.D, inner)
        z32 = g.evaluate(-ds.D_omega, inner)
        om = PuiseuxNumber.const(tower, tower.omega)
        s = (z32 - om * z22) / per.pi1
    return SiegelSeriesValue(a, s.truncate(prec), z22, z32, ds.D, ds.D_omega)


def siegel_s(a, prec=32, per=None):
    """s(a) = (log(-D_omega(a)) - omega log(-D(a))) / pi_1."""
    return siegel_s_details(a, prec, per).s


def s_leading_coefficient(per, prec=32):
    """kappa_0 = dfrak_0 (omega - omega^q) / pi_1, the coefficient of a in s(a)."""
    tower = per.tower
    om = tower.omega
    with precision(prec + margin(tower.q)):
        d0 = dfrak(per, 0, prec + 2 * tower.q)
        return (d0 * PuiseuxNumber.const(tower, om - om ** tower.q) / per.pi1).truncate(prec)


def neighborhood_radius(q, terms=24):
    """(rho_a, rho_s): the iteration for s(a) = s11 is certified for v(a) > rho_a.

    s(a) = sum_i kappa_i a^(q^i) with kappa_1 = 0 and
    v(kappa_i) >= min_{j + l = i} s (q^j - 1) + q^j v(dfrak_l) + s,  s = q/(q-1).
    The error e of an iterate moves to min_i v(kappa_i) + q^i e - v(kappa_0),
    which exceeds e as soon as e > (v(kappa_0) - v(kappa_i)) / (q^i - 1) for all i.
    """
    s = Fraction(q, q - 1)
    k0 = s + dfrak_valuation(q, 0)
    rho = -Fraction(q * q, q * q - 1)    # log-domain edge for v(a)
    for i in range(2, terms):
        vb = min(s * (q ** j - 1) + q ** j * dfrak_valuation(q, i - j) + s for j in range(i + 1))
        rho = max(rho, (k0 - vb) / (q ** i - 1))
    return rho, rho + k0


def local_inverse_s(s11, prec=32, per=None, max_steps=60):
    """a with s(a) = s11 to precision prec, by a <- a - (s(a) - s11) / kappa_0."""
    tower = s11.tower
    q = tower.q
    prec = Fraction(prec)
    if s11.is_zero() and s11.is_exact():
        return PuiseuxNumber.zero(tower)
    thr = neighborhood_radius(q)[1]
    if s11.valuation() <= thr:
        raise OutsideNeighborhood(
            f"v(s11) = {s11.valuation()} must exceed {thr} (certified neighborhood of 0)")
    per = per or periods(q, prec + 2 * margin(q))
    kappa = s_leading_coefficient(per, prec + 2 * margin(q))
    vk = kappa.valuation()
    # a carries precision prec - v(kappa) when s does to prec
    aprec = prec - vk
    with precision(prec + 2 * margin(q)):
        kinv = kappa.inverse()
        a = (s11 * kinv).truncate(aprec)
        last = -INF
        for step in range(max_steps):
            r = siegel_s(a, prec + 2, per) - s11
            if r.is_zero():
                return a
            err = r.valuation()
            if err <= last:
                raise ContractionFailure(f"step {step}: error stalled at t^{err}")
            last = err
            a = (a - r * kinv).truncate(aprec)
    raise ContractionFailure("no convergence")
