from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from tmotive import PuiseuxNumber as P, parse, precision, tower
from tmotive.errors import DivisionByZeroAtPrecision
from tmotive.puiseux import INF, frob_twist, r_infinity_rank, theta_diff

from conftest import puiseux, series

T2, T3 = tower(2), tower(3)


def test_theta_basics(T):
    th = P.theta(T)
    assert th * th.inverse() == 1
    assert th.valuation() == -1
    assert frob_twist(th, 1) == th ** T.q


def test_geometric_series_inverse():
    T = T2
    with precision(30):
        x = (P.theta(T) - 1).inverse()
    # oracle: the geometric series sum_{n>=1} theta^-n, multiplied back to 1
    assert x.precision() == 31          # relative precision 30 past v = 1
    assert [e for e, _ in x.terms()] == list(range(1, 31))
    assert all(c == T.one for _, c in x.terms())
    assert x * (P.theta(T) - 1) == 1


def test_fractional_frob_twist(T):
    q = T.q
    x = P.monomial(T, 1, Fraction(1, q - 1))          # theta^(-1/(q-1))
    y = frob_twist(x, 1)
    assert y == P.monomial(T, 1, Fraction(q, q - 1))   # theta^(-q/(q-1))
    # ram bookkeeping: raising back to the (q-1)-th power lands on theta^-q
    assert y ** (q - 1) == P.theta(T) ** (-q)
    assert x ** (q - 1) * P.theta(T) == 1


def test_theta_diff_examples(T):
    q = T.q
    th = P.theta(T)
    assert theta_diff(T, 1, 0) == th ** q - th
    for i, j in [(2, 0), (2, 1), (3, 1)]:
        assert theta_diff(T, i, j).valuation() == -q ** i
    assert theta_diff(T, 2, 0) == theta_diff(T, 2, 1) + theta_diff(T, 1, 0)
    assert theta_diff(T, 2, 1) == frob_twist(theta_diff(T, 1, 0), 1)


@pytest.mark.parametrize("i,j", [(1, 0), (2, 0), (2, 1), (3, 0), (3, 2), (4, 1)])
def test_theta_diff_inverse_valuation(T, i, j):
    d = theta_diff(T, i, j)
    inv = d.inverse()
    assert inv.valuation() == T.q ** i
    assert d * inv == 1


def test_r_infinity_rank_examples(T):
    one, zero, om = P.const(T, 1), P.zero(T), P.const(T, T.omega)
    assert r_infinity_rank([one, om])[0] == 2
    assert r_infinity_rank([one, zero, om])[0] == 2
    assert r_infinity_rank([one, om, one + om])[0] == 2


def test_r_infinity_rank_fractional(T3):
    T = T3
    x = P.monomial(T, 1, Fraction(1, 2))
    assert r_infinity_rank([P.const(T, 1), x])[0] == 2
    assert r_infinity_rank([P.const(T, 1), P.theta(T) ** 2 + P.const(T, 1)])[0] == 1


def test_zero_states(T):
    assert P.zero(T).zero_state() == "exact_zero"
    assert P.zero(T).valuation() == INF
    z = P.zero(T, 5)
    assert z.zero_state() == "zero_at_precision"
    assert z.valuation() == 5
    assert P.theta(T).zero_state() == "nonzero"
    with pytest.raises(DivisionByZeroAtPrecision):
        z.inverse()


def test_literal_roundtrip_example(T):
    with precision(12):
        x = (P.theta(T) + P.monomial(T, T.omega, Fraction(1, 3))).inverse()
    assert parse(x.to_literal(), T).to_literal() == x.to_literal()


@given(st.data())
def test_valuation_is_multiplicative_and_ultrametric(data):
    T = data.draw(st.sampled_from([T2, T3]))
    x = data.draw(puiseux(T, nonzero=True))
    y = data.draw(puiseux(T, nonzero=True))
    assert (x * y).valuation() == x.valuation() + y.valuation()
    s = x + y
    assert s.valuation() >= min(x.valuation(), y.valuation())
    if x.valuation() != y.valuation():
        assert s.valuation() == min(x.valuation(), y.valuation())


@given(st.data())
def test_inverse_to_reported_precision(data):
    T = data.draw(st.sampled_from([T2, T3]))
    x = data.draw(puiseux(T, nonzero=True))
    with precision(20):
        inv = x.inverse()
    r = x * inv - 1
    assert r.is_zero()
    assert r.precision() >= 20


@given(st.data())
def test_frob_twist_ring_homomorphism(data):
    T = data.draw(st.sampled_from([T2, T3]))
    x, y = data.draw(puiseux(T)), data.draw(puiseux(T))
    j = data.draw(st.integers(-2, 3))
    assert frob_twist(x + y, j) == frob_twist(x, j) + frob_twist(y, j)
    assert frob_twist(x * y, j) == frob_twist(x, j) * frob_twist(y, j)
    assert frob_twist(frob_twist(x, j), -j) == x


@given(st.data())
def test_frob_twist_is_qth_power(data):
    T = data.draw(st.sampled_from([T2, T3]))
    x = data.draw(puiseux(T))
    assert frob_twist(x, 1) == x ** T.q


@given(st.data())
def test_literal_roundtrip(data):
    T = data.draw(st.sampled_from([T2, T3]))
    x = data.draw(puiseux(T))
    assert parse(x.to_literal(), T).to_literal() == x.to_literal()


@given(st.data())
def test_inexact_arithmetic_tracks_precision(data):
    T = T2
    x = data.draw(puiseux(T, nonzero=True)).truncate(6)
    y = data.draw(puiseux(T, nonzero=True))
    assume(x.valuation() < 6)
    assert (x + y).precision() <= 6
    assert (x * y).precision() == 6 + y.valuation()


def test_series_helper_builds_exact(T):
    x = series(T, {0: 1, 2: 1})
    assert x.is_exact() and x.valuation() == 0
