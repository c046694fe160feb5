"""Independent closed forms used as test oracles."""
from tmotive import PuiseuxNumber as P
from tmotive.puiseux import frob_twist, theta_diff


def _inv_prod(T, pairs):
    acc = P.const(T, 1)
    for i, j in pairs:
        acc = acc * theta_diff(T, i, j)
    return acc.inverse()


def carlitz_c(T, j):
    """1 / (theta_{j,j-1} ... theta_{j,0})."""
    if j == 0:
        return P.const(T, 1)
    return _inv_prod(T, [(j, i) for i in range(j)])


def carlitz2_c(T, j):
    """1 / (theta_{j,j-2} theta_{j,j-4} ... theta_{j,0}) for even j, 0 for odd j."""
    if j % 2:
        return P.zero(T)
    if j == 0:
        return P.const(T, 1)
    return _inv_prod(T, [(j, i) for i in range(j - 2, -1, -2)])


def d_printed(T, a, m):
    """Closed forms of the lower-left entries of C_{t,m}(a), m <= 5."""
    A = [frob_twist(a, i) for i in range(5)]
    if m == 0:
        return P.zero(T)
    if m == 1:
        return A[0] * _inv_prod(T, [(1, 0)])
    if m == 2:
        return A[1] * _inv_prod(T, [(2, 1), (2, 0)])
    if m == 3:
        return (A[0] * _inv_prod(T, [(3, 1), (3, 0)])
                + A[2] * _inv_prod(T, [(3, 2), (3, 1), (3, 0)]))
    if m == 4:
        return (A[1] * _inv_prod(T, [(4, 2), (4, 1), (4, 0)])
                + A[3] * _inv_prod(T, [(4, 3), (4, 2), (4, 1), (4, 0)]))
    if m == 5:
        return (A[0] * _inv_prod(T, [(5, 3), (5, 1), (5, 0)])
                + A[2] * _inv_prod(T, [(5, 3), (5, 2), (5, 1), (5, 0)])
                + A[4] * _inv_prod(T, [(5, 4), (5, 3), (5, 2), (5, 1), (5, 0)]))
    raise ValueError("printed forms stop at m = 5")


def d_recurrence(T, a, m):
    """d_0 = 0; d_m = (a c_{2,m-1}^q [m odd] + d_{m-1}^q) / theta_{m0}."""
    d = P.zero(T)
    for k in range(1, m + 1):
        num = frob_twist(d, 1)
        if k % 2:
            num = num + a * frob_twist(carlitz2_c(T, k - 1), 1)
        d = num * theta_diff(T, k, 0).inverse()
    return d


def upper_entry(T, a, m):
    """Upper-right entry of C_m(a) for M(a): e_m = (a c_{m-1}^q + e_{m-2}^(q^2)) / theta_{m0}."""
    e = [P.zero(T), P.zero(T)]        # e_{-1}, e_0
    for k in range(1, m + 1):
        num = a * frob_twist(carlitz_c(T, k - 1), 1) + frob_twist(e[-2], 2)
        e.append(num * theta_diff(T, k, 0).inverse())
    return e[-1]
