import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from postprice.special import (CharPoly, NoSignChangeError, SingularBracketError, adaptive_simpson,
                               bisect, char_integral, char_poly, char_poly_roots, gamma_integral,
                               lower_incomplete_gamma)


def midpoint(f, lo, hi, n):
    x = lo + (np.arange(n) + 0.5) * (hi - lo) / n
    return float(np.sum(f(x)) * (hi - lo) / n)


# ---------------------------------------------------------------- incomplete gamma

def test_gamma_shape_one_closed_form():
    for x in (0.0, 0.1, 1.0, 7.5, 40.0):
        assert lower_incomplete_gamma(1.0, x) == pytest.approx(1 - math.exp(-x), rel=1e-12, abs=1e-15)


def test_gamma_integer_shape_closed_form():
    assert lower_incomplete_gamma(3.0, 200.0) == pytest.approx(2.0, rel=1e-14)
    closed = 2 - 17 * math.exp(-3)
    assert lower_incomplete_gamma(3.0, 3.0) == pytest.approx(closed, rel=1e-12)
    assert closed == pytest.approx(1.15362, abs=5e-6)
    for x in (0.01, 0.5, 2.0, 9.0, 25.0):
        ref = 2 - math.exp(-x) * (x * x + 2 * x + 2)
        assert lower_incomplete_gamma(3.0, x) == pytest.approx(ref, rel=1e-10, abs=1e-15)


def test_gamma_noninteger_shape_against_midpoint_rule():
    # s = 1.2 has an integrable but unbounded-derivative integrand at 0;
    # substitute t = u**(1/s) to get a smooth integrand
    s = 1.2
    for x in (0.3, 2.0, 6.0):
        ref = midpoint(lambda u: np.exp(-u ** (1 / s)) / s, 0.0, x**s, 200000)
        assert lower_incomplete_gamma(s, x) == pytest.approx(ref, rel=1e-9)


def test_gamma_errors():
    with pytest.raises(ValueError):
        lower_incomplete_gamma(0.0, 1.0)
    with pytest.raises(ValueError):
        lower_incomplete_gamma(2.0, -1.0)


@given(s=st.floats(1.01, 6.0), a=st.floats(0.0, 30.0), b=st.floats(0.0, 30.0), c=st.floats(0.0, 30.0))
def test_gamma_additive(s, a, b, c):
    lhs = gamma_integral(s, a, b) + gamma_integral(s, b, c)
    assert lhs == pytest.approx(gamma_integral(s, a, c), abs=1e-10 * math.gamma(s))


@given(s=st.floats(1.01, 6.0), x=st.floats(0.0, 50.0), dx=st.floats(0.0, 5.0))
def test_gamma_nondecreasing(s, x, dx):
    assert lower_incomplete_gamma(s, x + dx) >= lower_incomplete_gamma(s, x) - 1e-15


def test_gamma_integral_vectorized_signed():
    lo = np.array([0.0, 1.0, 5.0])
    hi = np.array([1.0, 0.0, 50.0])
    v = gamma_integral(3.0, lo, hi)
    assert v[0] == pytest.approx(-v[1])
    assert v[2] == pytest.approx(math.exp(-5) * (25 + 10 + 2), rel=1e-10)


# ---------------------------------------------------------------- bisection

def test_bisect_examples():
    assert bisect(lambda x: x - 1, 0.0, 2.0) == pytest.approx(1.0, abs=1e-10)
    assert bisect(lambda x: x * x - 2, 0.0, 2.0) == pytest.approx(math.sqrt(2), abs=1e-10)
    with pytest.raises(NoSignChangeError):
        bisect(lambda x: x * x + 1, 0.0, 2.0)


def test_adaptive_simpson_polynomial_and_empty():
    assert adaptive_simpson(lambda x: x**3, 0.0, 2.0) == pytest.approx(4.0, rel=1e-12)
    assert adaptive_simpson(math.exp, 1.0, 1.0) == 0.0


# ---------------------------------------------------------------- characteristic polynomial

def test_char_poly_examples():
    assert char_poly(CharPoly(2.0, 4.0), 2.0) == pytest.approx(0.0, abs=1e-14)
    assert char_poly(CharPoly(3.0, 3**1.5), 3**0.5) == pytest.approx(0.0, abs=1e-12)
    assert char_poly(CharPoly(2.0, 8.0), 1.0) == pytest.approx(1.0)
    cp = CharPoly(2.5, 7.0)
    assert cp(0.0) == pytest.approx(7.0 / 1.5)


def test_roots_examples():
    assert char_poly_roots(CharPoly(2.0, 3.0)) is None
    assert char_poly_roots(CharPoly(2.0, 4.0)) == pytest.approx((2.0, 2.0), abs=1e-12)
    lo, hi = char_poly_roots(CharPoly(2.0, 8.0))
    assert lo == pytest.approx(4 - 2 * math.sqrt(2), abs=1e-10)
    assert hi == pytest.approx(4 + 2 * math.sqrt(2), abs=1e-10)


def test_double_root_location():
    for s in (1.2, 2.0, 3.0, 4.5):
        a_min = s ** (s / (s - 1))
        r = char_poly_roots(CharPoly(s, a_min))
        assert r[0] == r[1] == pytest.approx(s ** (1 / (s - 1)), rel=1e-12)
        # just below the minimum there is no root
        assert char_poly_roots(CharPoly(s, a_min * (1 - 1e-6))) is None


@given(s=st.floats(1.1, 5.0), excess=st.floats(1e-6, 20.0))
def test_roots_residual_and_bracketing(s, excess):
    a_min = s ** (s / (s - 1))
    cp = CharPoly(s, a_min * (1 + excess))
    r = char_poly_roots(cp)
    assert r is not None
    lo, hi = r
    scale = cp.alpha / (s - 1) + hi**s
    assert abs(cp(lo)) <= 1e-10 * max(1.0, scale)
    assert abs(cp(hi)) <= 1e-10 * max(1.0, scale)
    assert lo <= cp.alpha / s <= hi


@given(s=st.floats(1.1, 5.0), excess=st.floats(1e-3, 20.0))
def test_sign_pattern_between_roots(s, excess):
    cp = CharPoly(s, s ** (s / (s - 1)) * (1 + excess))
    lo, hi = char_poly_roots(cp)
    inner = np.linspace(lo, hi, 52)[1:-1]
    assert np.all(np.array([cp(e) for e in inner]) < 0)
    outer = np.concatenate((np.linspace(0, lo, 50)[:-1], np.linspace(hi, 3 * hi, 50)[1:]))
    assert np.all(np.array([cp(e) for e in outer]) > 0)


def test_unimodal_minimum_at_alpha_over_s():
    cp = CharPoly(3.0, 9.0)
    eta = np.linspace(0, 6, 60001)
    vals = np.array([cp(e) for e in eta])
    assert eta[np.argmin(vals)] == pytest.approx(cp.alpha / cp.s, abs=1e-3)


def test_below_root_matches_direct_difference():
    cp = CharPoly(3.0, 3**1.5)
    b = 3**0.5
    for d in (1e-1, 1e-3):
        assert cp.below_root(b, d) == pytest.approx(cp(b - d) - cp(b), rel=1e-8)


# ---------------------------------------------------------------- integral of eta^(s-1)/P

def test_char_integral_examples():
    cp = CharPoly(2.0, 8.0)
    assert char_integral(cp, 3.0, 3.0) == 0.0
    ref = midpoint(lambda e: e / (e * e - 8 * e + 8), 7.0, 8.0, 10**6)
    assert char_integral(cp, 7.0, 8.0) == pytest.approx(ref, rel=1e-7)


def test_char_integral_near_double_root_converges():
    cp = CharPoly(2.0, 4.0)
    # antiderivative of e/(e-2)^2 is ln|e-2| - 2/(e-2)
    exact = (math.log(0.01) + 2 / 0.01) - (math.log(0.1) + 2 / 0.1)
    v = char_integral(cp, 1.9, 1.99)
    assert v > 100
    assert v == pytest.approx(exact, rel=1e-7)
    assert char_integral(cp, 1.9, 1.99, rtol=1e-11) == pytest.approx(v, rel=1e-7)


def test_char_integral_rejects_singular_bracket():
    with pytest.raises(SingularBracketError):
        char_integral(CharPoly(2.0, 4.0), 1.0, 3.0)
    with pytest.raises(SingularBracketError):
        char_integral(CharPoly(2.0, 8.0), 0.5, 2.0)


@given(s=st.floats(1.2, 4.0), excess=st.floats(0.0, 3.0),
       a=st.floats(0.05, 1.0), b=st.floats(0.05, 1.0), c=st.floats(0.05, 1.0))
def test_char_integral_additive(s, excess, a, b, c):
    cp = CharPoly(s, s ** (s / (s - 1)) * (1 + excess))
    roots = char_poly_roots(cp)
    top = 0.95 * roots[0] if roots else 5.0
    lo, mid, hi = sorted(x * top for x in (a, b, c))
    assume(hi - lo > 1e-6)
    whole = char_integral(cp, lo, hi)
    assert char_integral(cp, lo, mid) + char_integral(cp, mid, hi) == pytest.approx(whole, rel=1e-8)
