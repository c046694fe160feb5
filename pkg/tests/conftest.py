from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from tmotive import PuiseuxNumber, tower

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(params=[2, 3], ids=["q2", "q3"])
def T(request):
    return tower(request.param)


@pytest.fixture
def T2():
    return tower(2)


@pytest.fixture
def T3():
    return tower(3)


def series(T, terms, prec=None):
    """{exponent: code} -> PuiseuxNumber."""
    return PuiseuxNumber.from_terms(T, {Fraction(e): T.element(c) for e, c in terms.items()}, prec)


def random_series(rng, T, lo, hi, ram=1, lead=True):
    terms = {}
    for k in range(lo * ram, hi * ram + 1):
        c = rng.randrange(T.size)
        if lead and k == lo * ram and c == 0:
            c = 1
        if c:
            terms[Fraction(k, ram)] = c
    return series(T, terms)


@st.composite
def puiseux(draw, T, lo=-3, hi=4, ram=(1, 2, 3), nonzero=False):
    r = draw(st.sampled_from(ram))
    ks = draw(st.lists(st.integers(lo * r, hi * r), min_size=1 if nonzero else 0, max_size=5,
                       unique=True))
    cs = draw(st.lists(st.integers(1, T.size - 1), min_size=len(ks), max_size=len(ks)))
    return series(T, {Fraction(k, r): c for k, c in zip(ks, cs)})


@st.composite
def elements(draw, T, level=None):
    codes = [c for c in range(T.size) if level is None or T.in_level(c, level)]
    return T.element(draw(st.sampled_from(codes)))


# -- one summary line per acceptance criterion -----------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    n, title = mark.args
    ok, seen = _criteria.get(n, (True, title))
    _criteria[n] = (ok and rep.passed, seen)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok, title = _criteria[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}")
