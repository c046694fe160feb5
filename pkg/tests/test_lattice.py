
import pytest
from hypothesis import given, settings, strategies as st

from tmotive import PuiseuxNumber as P, tower
from tmotive.analytic import periods, siegel_s
from tmotive.errors import SingularHead
from tmotive.lattice import (LatticeBasis, SiegelMatrix, dual_exists, in_polynomial_ring,
                             is_siegel_of_lattice, kernel_residuals, lattices_isomorphic_1x2,
                             motive_lattice, polynomial_part, siegel, triangular_kernel_solve)
from tmotive.motive import exp_series, make_Ma

from conftest import puiseux

T2, T3 = tower(2), tower(3)
PREC = 20


def omega(T):
    return P.const(T, T.omega)


def test_siegel_of_the_direct_sum_basis(T):
    _, basis, S = motive_lattice("Ma", P.zero(T), PREC)
    per = periods(T.q, PREC)
    l1, l2, l3 = basis.columns
    assert l1[0].is_zero() and l1[0].is_exact()
    assert l1[1] == per.pi1 and l2[0] == per.pi2 and l3[0] == omega(T) * per.pi2
    assert S.equals(SiegelMatrix.row(P.zero(T), omega(T)))


def test_siegel_with_repeated_column(T):
    per = periods(T.q, PREC)
    l1 = (P.zero(T), per.pi1)
    l2 = (per.pi2, P.zero(T))
    S = siegel(LatticeBasis(2, 3, (l1, l2, l1)))
    assert S[0, 0] == 1 and S[0, 1].is_zero()


def test_singular_head(T):
    per = periods(T.q, PREC)
    l1 = (P.zero(T), per.pi1)
    with pytest.raises(SingularHead):
        siegel(LatticeBasis(2, 3, (l1, l1, l1)))


def test_upper_basis_moves_only_the_first_column(T):
    a = P.monomial(T, 1, 1) + P.monomial(T, T.omega, 2)
    _, basis, S = motive_lattice("Ma", a, PREC)
    per = periods(T.q, PREC)
    l1, l2, l3 = basis.columns
    assert l2[0] == per.pi2 and l2[1].is_zero()
    assert l3[0] == omega(T) * per.pi2 and l3[1].is_zero()
    assert not l1[0].is_zero()
    assert S.equals(SiegelMatrix.row(P.zero(T), omega(T)))


def test_lower_basis_uses_log_of_minus_d(T):
    a = P.monomial(T, 1, 1) + P.monomial(T, T.omega, 3)
    _, basis, S = motive_lattice("Mt", a, PREC)
    per = periods(T.q, PREC)
    l1, l2, l3 = basis.columns
    assert l1[0].is_zero() and l1[1] == per.pi1
    assert l2[0] == per.pi2 and l3[0] == omega(T) * per.pi2
    # the second coordinates solve exp_C(z) = -D, cross-checked against the analytic module
    assert (S[0, 0] - siegel_s(a, PREC)).is_zero()
    assert S[0, 1] == omega(T)


def test_kernel_columns_and_theta_multiples_vanish(T):
    for kind in ("Ma", "Mt"):
        a = P.monomial(T, 1, 1)
        m, basis, _ = motive_lattice(kind, a, PREC + 2)
        for r0, r1 in kernel_residuals(m, basis, PREC):
            assert r0 >= PREC and r1 >= PREC


def test_triangular_solve_rejects_bad_orientation(T):
    m = make_Ma(P.monomial(T, 1, 1))
    E = exp_series(m, 4)
    with pytest.raises(ValueError):
        triangular_kernel_solve(E, "diagonal", PREC)


def test_dual_examples_q3(T3):
    T = T3
    om = omega(T)
    assert not dual_exists(SiegelMatrix.row(P.zero(T), om))
    assert not dual_exists(SiegelMatrix.row(P.monomial(T, T.omega, 1), om))
    v = dual_exists(SiegelMatrix.row(periods(3, PREC).pi1, om))
    assert v and v.rank == 3 and v.needed == 3


def test_dual_for_pi1_at_q2(T2):
    # at q = 2 the period lies in F_2((1/theta)), so (1, pi_1) is R_inf-dependent
    T = T2
    pi1 = periods(2, PREC).pi1
    assert pi1.valuation().denominator == 1
    v = dual_exists(SiegelMatrix.row(pi1, omega(T)))
    assert not v and v.rank == 2


@settings(max_examples=15)
@given(st.data())
def test_no_dual_for_entries_in_r_inf_2(data):
    T = data.draw(st.sampled_from([T2, T3]))
    codes = [c for c in range(T.size) if T.in_level(c, 2)]
    ks = data.draw(st.lists(st.integers(-3, 5), min_size=1, max_size=4, unique=True))
    cs = data.draw(st.lists(st.sampled_from(codes[1:]), min_size=len(ks), max_size=len(ks)))
    s = P.from_terms(T, {k: T.element(c) for k, c in zip(ks, cs)})
    assert not dual_exists(SiegelMatrix.row(s, omega(T)))


def test_lattice_condition(T):
    S = SiegelMatrix.row(P.zero(T), omega(T))
    assert is_siegel_of_lattice(S)
    assert not is_siegel_of_lattice(SiegelMatrix.row(P.zero(T), P.const(T, 1)))


def test_isomorphism_examples(T):
    om = omega(T)
    S0 = SiegelMatrix.row(P.zero(T), om)
    assert lattices_isomorphic_1x2(S0, S0)
    _, _, Sa = motive_lattice("Ma", P.monomial(T, 1, 1), PREC)
    assert lattices_isomorphic_1x2(S0, Sa)
    v = lattices_isomorphic_1x2(S0, SiegelMatrix.row(periods(T.q, PREC).pi1, om))
    assert not v
    assert v.status == ("distinct-at-precision" if T.q > 2 else "inconclusive")


@settings(max_examples=15)
@given(st.data())
def test_normalization_moves_are_recognized(data):
    T = data.draw(st.sampled_from([T2, T3]))
    s1 = data.draw(puiseux(T, lo=1, hi=4))
    s2 = omega(T) + data.draw(puiseux(T, lo=1, hi=4))
    poly = P.from_terms(T, {-k: T.element(c) for k, c in
                            enumerate(data.draw(st.lists(st.sampled_from(T.fq_codes),
                                                         min_size=1, max_size=3)))})
    c = P.const(T, T.element(data.draw(st.sampled_from(T.fq_codes[1:]))))
    S1 = SiegelMatrix.row(s1, s2)
    S2 = SiegelMatrix.row(c * (s1 + poly), c * s2)
    assert lattices_isomorphic_1x2(S1, S2)
    S3 = SiegelMatrix.row(s2, s1)
    assert lattices_isomorphic_1x2(S1, S3)


def test_polynomial_part(T):
    th = P.theta(T)
    x = th ** 2 + 1 + P.monomial(T, 1, 1)
    assert polynomial_part(x) == th ** 2 + 1
    assert in_polynomial_ring(th ** 3 + th)
    assert not in_polynomial_ring(x)
    assert not in_polynomial_ring(omega(T))


def test_json_roundtrips(T):
    _, basis, S = motive_lattice("Mt", P.monomial(T, 1, 2), 12)
    back = LatticeBasis.from_json(basis.to_json(), T)
    assert all(x.to_literal() == y.to_literal()
               for c1, c2 in zip(basis.columns, back.columns) for x, y in zip(c1, c2))
    assert SiegelMatrix.from_dict(S.to_dict(), T).equals(S)
    assert basis.is_lattice()
