import math
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from igusa2d.algebra import (
    INF,
    PolyQT,
    ZetaRat,
    floor_sum,
    geometric_sum,
    poly_latex,
    real_pole_parts,
    same_value,
    zr_add,
    zr_from_json,
    zr_latex,
    zr_mul,
    zr_reduce,
    zr_series,
    zr_to_json,
)
from igusa2d.errors import DivergentFactor, NonPositiveGrowth

Q, T = PolyQT.mono(1, 0), PolyQT.mono(0, 1)
ONE = PolyQT.const(1)


def zr(num, *den):
    return ZetaRat(num, den)


def series_by_direct_sum(terms, q, order):
    """terms: iterable of (degQ, degT) monomials with coefficient 1."""
    out = [Fraction(0)] * (order + 1)
    for i, j in terms:
        if j <= order:
            out[j] += Fraction(1, q**i)
    return out


# -- zr_add -------------------------------------------------------------------------

def test_add_identity():
    a = zr(ONE, (1, 1))
    assert zr_add(a, ZetaRat()) == a


def test_add_common_denominator():
    s = zr_add(zr(Q, (1, 1)), zr(PolyQT.mono(2, 1), (1, 1)))
    assert s.den_counter() == {(1, 1): 1}
    assert s.num == Q + PolyQT.mono(2, 1)


def test_add_distinct_denominators():
    s = zr_add(zr(ONE, (1, 1)), zr(ONE, (2, 4)))
    expected = zr(PolyQT.const(2) - PolyQT.mono(1, 1) - PolyQT.mono(2, 4), (1, 1), (2, 4))
    assert s.num == expected.num and sorted(s.den) == sorted(expected.den)
    assert zr_series(s, 3, 20) == zr_series(expected, 3, 20)


# -- zr_mul -------------------------------------------------------------------------

def test_mul_identity():
    a = zr(Q + T, (1, 2))
    assert zr_mul(a, ZetaRat.const(1)) == a


def test_mul_cancellation():
    r = zr_reduce(zr_mul(ZetaRat(ONE - Q), zr(Q, (1, 0))))
    assert r.num == Q and not r.den


def test_mul_cone_shape():
    r = zr_mul(zr(PolyQT.mono(2, 4), (2, 4)), zr(PolyQT.mono(5, 12), (5, 12)))
    assert r.num == PolyQT.mono(7, 16)
    assert sorted(r.den) == [(2, 4), (5, 12)]


# -- zr_reduce ----------------------------------------------------------------------

def test_reduce_full_cancel():
    r = zr_reduce(zr(ONE - PolyQT.mono(1, 1), (1, 1)))
    assert r.num == ONE and not r.den


def test_reduce_long_division():
    r = zr_reduce(zr(ONE - PolyQT.mono(2, 2), (1, 1)))
    assert r.num == ONE + PolyQT.mono(1, 1) and not r.den


def test_reduce_irreducible():
    a = zr(Q + PolyQT.mono(2, 1), (1, 1))
    r = zr_reduce(a)
    assert r.num == a.num and r.den == a.den


def test_reduce_lowers_cyclotomic_factor():
    # (1 + QT) / (1 - Q^2 T^2) = 1 / (1 - QT)
    r = zr_reduce(zr(ONE + PolyQT.mono(1, 1), (2, 2)))
    assert r.num == ONE and list(r.den) == [(1, 1)]


# -- zr_series ----------------------------------------------------------------------

def test_series_geometric():
    s = zr_series(zr(ONE - Q, (1, 1)), 3, 2)
    assert list(s.coeffs) == [Fraction(2, 3), Fraction(2, 9), Fraction(2, 27)]


def test_series_constant():
    assert list(zr_series(ZetaRat.const(1), 5, 3).coeffs) == [1, 0, 0, 0]


def test_series_against_direct_expansion():
    a = zr(Q + PolyQT.mono(2, 1), (2, 1))
    terms = [(1 + 2 * k, k) for k in range(10)] + [(2 + 2 * k, 1 + k) for k in range(10)]
    assert list(zr_series(a, 2, 3).coeffs) == series_by_direct_sum(terms, 2, 3)
    assert zr_series(a, 2, 3).coeffs[:2] == (Fraction(1, 2), Fraction(3, 8))


def test_series_scalar_factor():
    s = zr_series(zr(ONE, (1, 0)), 3, 1)
    assert list(s.coeffs) == [Fraction(3, 2), 0]


def test_series_divergent():
    with pytest.raises(DivergentFactor):
        zr_series(zr(ONE, (0, 0)), 3, 2)
    with pytest.raises(DivergentFactor):
        geometric_sum(1, INF, (0, 0))


# -- geometric_sum ------------------------------------------------------------------

def test_geometric_infinite():
    assert geometric_sum(1, INF, (1, 0)) == zr(Q, (1, 0))
    g = geometric_sum(1, INF, (2, 4))
    assert g.num == PolyQT.mono(2, 4) and list(g.den) == [(2, 4)]


def test_geometric_finite():
    g = geometric_sum(2, 5, (1, 1))
    assert g == zr(PolyQT.mono(2, 2) - PolyQT.mono(6, 6), (1, 1))


@given(st.integers(0, 6), st.integers(0, 8), st.integers(0, 3), st.integers(0, 3))
def test_geometric_finite_is_monomial_sum(A, n, cq, ct):
    g = geometric_sum(A, A + n, (cq, ct))
    direct = PolyQT()
    for k in range(A, A + n + 1):
        direct = direct + PolyQT.mono(cq * k, ct * k)
    assert g.num == direct and not g.den


# -- floor_sum ----------------------------------------------------------------------

def test_floor_sum_integer_slope():
    assert floor_sum(1, 2, (1, 0, 0, 1)) == zr(PolyQT.mono(1, 2), (1, 2))


def test_floor_sum_half():
    r = floor_sum(1, Fraction(1, 2), (1, 0, 0, 1))
    assert r == zr(Q + PolyQT.mono(2, 1), (2, 1))


def test_floor_sum_five_halves():
    r = floor_sum(1, Fraction(5, 2), (1, 1, 0, 0))
    # m=1: Q^(1+2)=Q^3, m=2: Q^(2+5)=Q^7, then period 2 adds Q^7
    assert r == zr(PolyQT.mono(3, 0) + PolyQT.mono(7, 0), (7, 0))


def test_floor_sum_rejects_nonpositive_growth():
    with pytest.raises(NonPositiveGrowth):
        floor_sum(1, 1, (0, 0, 1, 0))


@pytest.mark.parametrize("tau", [Fraction(0), Fraction(1), Fraction(1, 2), Fraction(2, 3),
                                 Fraction(5, 2), Fraction(4)])
@pytest.mark.parametrize("lin", [(1, 0, 0, 1), (1, 1, 2, 0), (2, 1, 1, 3)])
def test_floor_sum_partial_sums(tau, lin):
    c1, c2, c3, c4 = lin
    terms = []
    for m in range(1, 51):
        fl = math.floor(m * tau)
        terms.append((c1 * m + c2 * fl, c3 * m + c4 * fl))
    # only T-degrees reached by all 50 terms are complete
    order = min(c3 * 51 + c4 * math.floor(51 * tau), 60) - 1
    expect = series_by_direct_sum(terms, 3, order)
    assert list(zr_series(floor_sum(1, tau, lin), 3, order).coeffs) == expect


# -- real_pole_parts ----------------------------------------------------------------

def test_pole_parts():
    assert real_pole_parts(zr(ONE, (9, 20))) == {Fraction(-9, 20)}
    assert real_pole_parts(ZetaRat(Q)) == set()
    assert real_pole_parts(zr(ONE, (1, 1), (2, 4))) == {Fraction(-1), Fraction(-1, 2)}


# -- properties ---------------------------------------------------------------------

monos = st.tuples(st.integers(0, 4), st.integers(0, 4))
polys = st.dictionaries(monos, st.fractions(min_value=-5, max_value=5, max_denominator=4),
                        min_size=1, max_size=4).map(PolyQT)
dens = st.lists(st.tuples(st.integers(0, 4), st.integers(1, 4)), max_size=3)
zetas = st.builds(ZetaRat, polys, dens)


@given(zetas, zetas, st.sampled_from([2, 3, 5]))
def test_series_additive(a, b, q):
    assert zr_series(a + b, q, 25) == zr_series(a, q, 25) + zr_series(b, q, 25)


@given(zetas, zetas, st.sampled_from([2, 3, 5]))
def test_series_multiplicative(a, b, q):
    assert zr_series(a * b, q, 25) == zr_series(a, q, 25) * zr_series(b, q, 25)


@given(zetas)
def test_reduce_preserves_value(a):
    r = zr_reduce(a)
    assert zr_series(r, 3, 25) == zr_series(a, 3, 25)
    assert same_value(r, a)
    for f in set(r.den):
        assert r.num.div_one_minus(f.alpha, f.beta) is None


@given(zetas, polys)
def test_pole_parts_stable_under_numerator_scaling(a, c):
    assume(not a.is_zero() and not c.is_zero())
    assert real_pole_parts(a * ZetaRat(c)) == real_pole_parts(a)


@given(zetas)
def test_json_round_trip(a):
    b = zr_from_json(zr_to_json(a))
    assert b.num == a.num and sorted(b.den) == sorted(a.den)


def test_latex_notation():
    assert poly_latex(PolyQT.mono(2, 4) - PolyQT.mono(1, 0)) == "-q^{-1} + q^{-2-4s}"
    assert zr_latex(zr(Q, (9, 20))) == "\\frac{q^{-1}}{(1 - q^{-9-20s})}"
