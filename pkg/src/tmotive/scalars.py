"""Finite-field tower F_q ⊂ F_{q^2} ⊂ ... ⊂ F_{q^k}.

The top field is F_p[x]/(f) for the first monic irreducible f of degree
e0*k over F_p, where polynomials are ordered by the integer sum(c_i p^i)
of their lower coefficients.  Elements are encoded as integer codes
sum(c_i p^i) of their coordinates in the power basis of x; every table
below is indexed by these codes.  Subfields F_{q^j} (j | k) are the fixed
points of x -> x^(q^j); each carries its own generator (the first code of
the right degree) so that elements can be printed in level coordinates.
"""
from __future__ import annotations

import functools
import math
import re
from itertools import product

import numpy as np


def _is_prime(n):
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def _factor_prime_power(q):
    for p in range(2, q + 1):
        if q % p == 0:
            e, r = 0, q
            while r % p == 0:
                r //= p
                e += 1
            if r != 1 or not _is_prime(p):
                raise ValueError(f"q={q} is not a prime power")
            return p, e
    raise ValueError(f"q={q} is not a prime power")


def _polymod(a, f, p):
    """Remainder of a modulo monic f, coefficient lists low -> high."""
    a = list(a)
    n = len(f) - 1
    for d in range(len(a) - 1, n - 1, -1):
        c = a[d] % p
        if c:
            for i in range(n + 1):
                a[d - n + i] = (a[d - n + i] - c * f[i]) % p
    return [c % p for c in a[:n]] + [0] * max(0, n - len(a))


def _is_irreducible(f, p):
    n = len(f) - 1
    for d in range(1, n // 2 + 1):
        for low in product(range(p), repeat=d):
            g = list(low) + [1]
            if not any(_polymod(f, g, p)):
                return False
    return True


def first_irreducible(p, n):
    """First monic irreducible polynomial of degree n over F_p."""
    for code in range(p ** n):
        low = [(code // p ** i) % p for i in range(n)]
        f = low + [1]
        if _is_irreducible(f, p):
            return f
    raise AssertionError("unreachable: irreducibles exist in every degree")


class FieldTower:
    """Tables for F_{q^k} with q = p^e0 and the subfield levels j | k."""

    def __init__(self, p, e0, k):
        if not _is_prime(p) or e0 < 1:
            raise ValueError("need a prime p and e0 >= 1")
        if k < 2 or k % 2:
            raise ValueError("the tower must contain F_{q^2}: k must be even")
        self.p, self.e0, self.k = p, e0, k
        self.q = p ** e0
        self.n = n = e0 * k
        self.size = N = p ** n
        self.modulus = first_irreducible(p, n)

        self.pow_p = np.array([p ** i for i in range(n)], dtype=np.int64)
        coords = np.array([[(c // p ** i) % p for i in range(n)] for c in range(N)],
                          dtype=np.int64)
        self.coords = coords
        self.add_t = ((coords[:, None, :] + coords[None, :, :]) % p) @ self.pow_p
        self.neg_t = ((-coords) % p) @ self.pow_p
        mul = np.zeros((N, N), dtype=np.int64)
        for a in range(N):
            for b in range(a, N):
                prod_ = np.convolve(coords[a], coords[b]) % p
                c = sum(v * p ** i for i, v in enumerate(_polymod(prod_, self.modulus, p)))
                mul[a, b] = mul[b, a] = c
        self.mul_t = mul
        inv = np.zeros(N, dtype=np.int64)
        for a in range(1, N):
            inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
        self.inv_t = inv

        frob_p = np.array([self._pow(c, p) for c in range(N)], dtype=np.int64)
        frob_q = np.arange(N, dtype=np.int64)
        for _ in range(e0):
            frob_q = frob_p[frob_q]
        self.frob_t = [np.arange(N, dtype=np.int64)]
        for _ in range(1, k):
            self.frob_t.append(frob_q[self.frob_t[-1]])
        self._frob_p = frob_p

        self.fq_codes = [c for c in range(N) if frob_q[c] == c]
        omega = next(c for c in range(N)
                     if self.frob_t[2 % k][c] == c and frob_q[c] != c)
        self.omega_code = omega
        self._build_levels()
        self._build_fq_coords()

    def __repr__(self):
        return f"FieldTower(q={self.q}, k={self.k})"

    def __reduce__(self):
        return (tower, (self.q, self.k))

    def _pow(self, a, e):
        r, b = 1, a
        while e:
            if e & 1:
                r = int(self.mul_t[r, b])
            b = int(self.mul_t[b, b])
            e >>= 1
        return r

    def _degree_over_fp(self, c):
        d, x = 1, int(self._frob_p[c])
        while x != c:
            x = int(self._frob_p[x])
            d += 1
        return d

    def _build_levels(self):
        # level j holds F_{q^j}; its generator is the first code of degree e0*j over F_p
        p = self.p
        self.levels = [j for j in range(1, self.k + 1) if self.k % j == 0]
        self._level_gen = {}
        self._level_to_code = {}
        self._level_from_code = {}
        for j in self.levels:
            d = self.e0 * j
            gen = next(c for c in range(self.size) if self._degree_over_fp(c) == d)
            powers = [1]
            for _ in range(d - 1):
                powers.append(int(self.mul_t[powers[-1], gen]))
            to_code, from_code = {}, {}
            for vec in product(range(p), repeat=d):
                c = 0
                for coef, pw in zip(vec, powers):
                    for _ in range(coef):
                        c = int(self.add_t[c, pw])
                to_code[vec] = c
                from_code[c] = vec
            self._level_gen[j] = gen
            self._level_to_code[j] = to_code
            self._level_from_code[j] = from_code

    def _build_fq_coords(self):
        # F_q-coordinates along the basis 1, x, ..., x^(k-1) of the top field
        basis = [1]
        x = self._level_gen[self.k]
        for _ in range(self.k - 1):
            basis.append(int(self.mul_t[basis[-1], x]))
        table = np.zeros((self.size, self.k), dtype=np.int64)
        for lam in product(self.fq_codes, repeat=self.k):
            c = 0
            for l, b in zip(lam, basis):
                c = int(self.add_t[c, self.mul_t[l, b]])
            table[c] = lam
        self.fq_coords = table
        self.fq_basis = basis

    # -- code-level helpers -------------------------------------------------

    def frob_table(self, j):
        """Table of x -> x^(q^j); negative j gives the inverse Frobenius."""
        return self.frob_t[j % self.k]

    def in_level(self, code, j):
        return int(self.frob_table(j)[code]) == code

    def minimal_level(self, code):
        return next(j for j in self.levels if self.in_level(code, j))

    def level_coords(self, code, j):
        try:
            return self._level_from_code[j][code]
        except KeyError:
            raise ValueError(f"element is not in F_{{q^{j}}}") from None

    def level_name(self, j):
        return f"F{self.q ** j}"

    # -- series kernels -----------------------------------------------------

    def vadd(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        return self.add_t[a, b]

    def vsub(self, a, b):
        return self.vadd(a, self.neg_t[b])

    def conv(self, a, b, maxlen=None):
        """Product of two coefficient arrays, truncated to maxlen entries."""
        if maxlen is not None:
            a, b = a[:maxlen], b[:maxlen]
        if len(a) == 0 or len(b) == 0:
            return np.zeros(0, dtype=np.int64)
        L = len(a) + len(b) - 1
        if maxlen is not None:
            L = min(L, maxlen)
        nza, nzb = np.flatnonzero(a), np.flatnonzero(b)
        if len(nzb) < len(nza):
            a, b, nza, nzb = b, a, nzb, nza
        if len(nza) <= 48 or len(nza) * 8 < len(a):
            out = np.zeros(L, dtype=np.int64)
            for i in nza:
                if i >= L:
                    break
                seg = self.mul_t[a[i], b[:L - i]]
                out[i:i + len(seg)] = self.vadd(out[i:i + len(seg)], seg)
            return out
        return self._dense_conv(a, b, L)

    def _dense_conv(self, a, b, L):
        n, p = self.n, self.p
        A, B = self.coords[a], self.coords[b]
        full = len(a) + len(b) - 1
        if len(a) * len(b) <= 20000:
            acc = np.zeros((full, 2 * n - 1), dtype=np.int64)
            for i in range(n):
                for j in range(n):
                    acc[:, i + j] += np.convolve(A[:, i], B[:, j])
        else:
            size = 1 << (full - 1).bit_length()
            FA = np.fft.rfft(A.astype(np.float64), size, axis=0)
            FB = np.fft.rfft(B.astype(np.float64), size, axis=0)
            spec = np.zeros((FA.shape[0], 2 * n - 1), dtype=np.complex128)
            for i in range(n):
                for j in range(n):
                    spec[:, i + j] += FA[:, i] * FB[:, j]
            acc = np.rint(np.fft.irfft(spec, size, axis=0)[:full]).astype(np.int64)
        acc = acc[:L] % p
        f = self.modulus
        for d in range(2 * n - 2, n - 1, -1):
            col = acc[:, d]
            for l in range(n):
                if f[l]:
                    acc[:, d - n + l] -= col * f[l]
        acc %= p
        return acc[:, :n] @ self.pow_p

    def series_inv(self, u, N):
        """First N coefficients of 1/u for a coefficient array with u[0] != 0."""
        g = np.array([self.inv_t[u[0]]], dtype=np.int64)
        m = 1
        while m < N:
            m = min(2 * m, N)
            h = self.conv(u[:m], g, m)
            h = np.concatenate([h, np.zeros(m - len(h), dtype=np.int64)])
            h[0] = self.vsub(h[0], 1)
            corr = self.conv(g, h, m)
            corr = np.concatenate([corr, np.zeros(m - len(corr), dtype=np.int64)])
            g = self.vsub(np.concatenate([g, np.zeros(m - len(g), dtype=np.int64)]), corr)
        return g[:N]

    # -- element constructors -----------------------------------------------

    def element(self, code):
        return FF(self, int(code))

    @property
    def zero(self):
        return FF(self, 0)

    @property
    def one(self):
        return FF(self, 1)

    @property
    def omega(self):
        return FF(self, self.omega_code)

    def from_int(self, n):
        return FF(self, self.to_code(n))

    def to_code(self, x):
        """Code of an int (image of Z -> F_p) or an FF element."""
        if isinstance(x, FF):
            if x.tower is not self:
                raise ValueError("element of a different tower")
            return x.code
        if isinstance(x, (int, np.integer)):
            return int(x) % self.p
        raise TypeError(f"cannot coerce {type(x).__name__} into {self!r}")

    def elements(self, level=None):
        """All elements of F_{q^level} (the top field by default) in code order."""
        level = self.k if level is None else level
        return [FF(self, c) for c in range(self.size) if self.in_level(c, level)]

    def parse_element(self, text):
        m = re.fullmatch(r"\s*F(\d+):\[([^\]]*)\]\s*", text)
        if not m:
            raise ValueError(f"bad element literal {text!r}")
        size = int(m.group(1))
        j = next((j for j in self.levels if self.q ** j == size), None)
        if j is None:
            raise ValueError(f"{self!r} has no level of size {size}")
        vec = tuple(int(v) for v in m.group(2).split(",")) if m.group(2).strip() else ()
        if len(vec) != self.e0 * j or any(not 0 <= v < self.p for v in vec):
            raise ValueError(f"bad coordinates in {text!r}")
        return FF(self, self._level_to_code[j][vec])


@functools.lru_cache(maxsize=None)
def _tower(p, e0, k):
    return FieldTower(p, e0, k)


def required_degree(q):
    """Smallest even k such that F_{q^k} holds the leading coefficients of both periods.

    Those coefficients solve a^(q-1) = -1 and a^(q^2-1) = -1.
    """
    p, _ = _factor_prime_power(q)
    need = 1 if p == 2 else 2 * (q * q - 1)
    k = 2
    while (q ** k - 1) % need:
        k += 2
    return k


def tower(q=2, k=None):
    """Shared FieldTower for F_q ⊂ F_{q^k} (k chosen automatically when omitted)."""
    p, e0 = _factor_prime_power(q)
    if k is None:
        k = required_degree(q)
    return _tower(p, e0, k)


class FF:
    """An element of a FieldTower, stored by its integer code."""

    __slots__ = ("tower", "code")

    def __init__(self, tower_, code):
        self.tower = tower_
        self.code = int(code)

    def _other(self, y):
        return self.tower.to_code(y)

    def __add__(self, y):
        return FF(self.tower, self.tower.add_t[self.code, self._other(y)])

    __radd__ = __add__

    def __neg__(self):
        return FF(self.tower, self.tower.neg_t[self.code])

    def __sub__(self, y):
        return self + (-FF(self.tower, self._other(y)))

    def __rsub__(self, y):
        return FF(self.tower, self._other(y)) - self

    def __mul__(self, y):
        return FF(self.tower, self.tower.mul_t[self.code, self._other(y)])

    __rmul__ = __mul__

    def inverse(self):
        if self.code == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return FF(self.tower, self.tower.inv_t[self.code])

    def __truediv__(self, y):
        return self * FF(self.tower, self._other(y)).inverse()

    def __rtruediv__(self, y):
        return FF(self.tower, self._other(y)) * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return FF(self.tower, self.tower._pow(self.code, e))

    def __eq__(self, y):
        try:
            return self.code == self._other(y)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((id(self.tower), self.code))

    def __bool__(self):
        return self.code != 0

    def frobenius(self, j=1):
        return frobenius(self, j)

    def level(self):
        return self.tower.minimal_level(self.code)

    def to_literal(self, level=None):
        t = self.tower
        level = t.k if level is None else level
        vec = t.level_coords(self.code, level)
        return f"{t.level_name(level)}:[{','.join(map(str, vec))}]"

    def __str__(self):
        return self.to_literal(self.level())

    def __repr__(self):
        return f"FF({self})"


def frobenius(x, j):
    """x^(q^j)."""
    if j < 0:
        raise ValueError("j must be >= 0")
    return FF(x.tower, x.tower.frob_table(j)[x.code])


def in_subfield(x, level):
    """True iff x lies in F_{q^level}."""
    t = x.tower
    if level not in t.levels:
        raise ValueError(f"F_{{q^{level}}} is not a level of {t!r}")
    return t.in_level(x.code, level)
