from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from psi_point import ForgottenSpec, dr_integral, dr_integral_poly, dr_series, forgotten_integral_direct, forgotten_series
from psi_point.dr import dr_genus
from psi_point.kernel import APolynomial

import oracles


def two_point_dr_oracle(k, order):
    """(S(kx) - S(x)) / (x S(x)) along x1 = x, x2 = 0, by plain Fractions."""
    num = [u - v for u, v in zip(oracles.S(k, order + 1), oracles.S(1, order + 1))]
    quotient = num[1:]
    return oracles.mul(quotient, oracles.inverse(oracles.S(1, order), order), order)


def test_two_point_x1_coefficient():
    assert dr_series([2, -2], 3).coefficient((1, 0)) == mpq(1, 8)
    assert dr_series([1, -1], 3).coefficient((1, 0)) == 0


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_two_point_matches_univariate_oracle(k):
    s = dr_series([k, -k], 7)
    assert [Fraction(s.coefficient((d, 0))) for d in range(8)] == two_point_dr_oracle(k, 7)


def test_three_point_constant_term():
    assert dr_series([1, 1, -2], 2).coefficient((0, 0, 0)) == 1


def test_dr_series_requires_balance():
    with pytest.raises(ValueError):
        dr_series([1, 2], 3)


def test_dr_integral_examples():
    assert dr_integral([3, -3], [1, 0]) == mpq(1, 3)
    assert dr_integral([1, 1, -2], [0, 0, 0]) == 1
    assert dr_integral([1, -1], [0, 0]) == 0


def test_dr_integral_wrong_dimension_is_zero():
    # degree 2 with 3 points would be genus 1; degree 1 is no genus at all
    assert dr_genus(3, 1) is None
    assert dr_integral([1, 1, -2], [1, 0, 0]) == 0


def test_dr_genus():
    assert dr_genus(2, 1) == 1
    assert dr_genus(3, 0) == 0
    assert dr_genus(3, 3) is None
    assert dr_genus(4, 0) is None


def test_dr_integral_poly_examples():
    want = APolynomial(1, {(2,): mpq(1, 24), (0,): mpq(-1, 24)})
    assert dr_integral_poly(2, (1, 0)) == want
    assert dr_integral_poly(2, (0, 1)) == want
    assert str(want) == "1/24*a1^2 - 1/24"
    assert dr_integral_poly(3, (0, 0, 0)) == APolynomial(2, {(0, 0): 1})


def test_dr_integral_poly_matches_point_values():
    poly = dr_integral_poly(3, (2, 1, 1))
    for a in ([4, -1], [-3, 7], [5, 5]):
        full = a + [-sum(a)]
        assert poly(a) == dr_integral(full, (2, 1, 1))


def test_dr_integral_poly_rejects_bad_dimension():
    with pytest.raises(ValueError):
        dr_integral_poly(3, (1, 0, 0))


@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=2, max_size=2), st.permutations(range(3)))
def test_dr_integral_symmetric(head, rho):
    a = head + [-sum(head)]
    if a.count(0) > 1:
        return
    d = (2, 1, 1)
    assert dr_integral([a[r] for r in rho], [d[r] for r in rho]) == dr_integral(a, d)


# --- forgotten points ---------------------------------------------------------------


def test_forgotten_spec_validation():
    with pytest.raises(ValueError):
        ForgottenSpec((1, -1), ())
    with pytest.raises(ValueError):
        ForgottenSpec((1, 1, 1), (1,))
    spec = ForgottenSpec((1, 2, -5), (1, 1))
    assert (spec.n, spec.m) == (3, 2)
    assert len(list(spec.assignments())) == 16


def test_shifted_weights():
    spec = ForgottenSpec((1, 2, -5), (1, 1))
    # block 0 leaves a point free; block k glues it onto kept point k
    assert spec.shifted((0, 0)) == (1, 2, -5)
    assert spec.shifted((1, 1)) == (3, 2, -5)
    assert spec.shifted((3, 0)) == (1, 2, -4)


def test_m0_equals_dr_series():
    spec = ForgottenSpec((1, 2, -3), ())
    assert forgotten_series(spec, 4) == dr_series((1, 2, -3), 4)
    assert forgotten_integral_direct(spec, (1, 1, 0)) == dr_integral((1, 2, -3), (1, 1, 0))


def test_m1_routes_agree():
    spec = ForgottenSpec((1, 1, -2), (0,))
    direct = forgotten_integral_direct(spec, (1, 0, 0))
    assert direct == forgotten_series(spec, 1).coefficient((1, 0, 0))


def test_m2_routes_agree():
    spec = ForgottenSpec((2, -1, 1), (-1, -1))
    series = forgotten_series(spec, 4)
    for d in [(2, 0, 0), (1, 1, 0), (0, 1, 1), (3, 1, 0), (2, 2, 0), (1, 1, 2)]:
        assert forgotten_integral_direct(spec, d) == series.coefficient(d)


def test_low_degrees_vanish_after_restriction():
    # three free kept points plus the balancing one, one forgotten point: g = 1, n = 3
    spec = ForgottenSpec((1, 2, 3, -8), (2,))
    restricted = forgotten_series(spec, 5).restrict(3)
    for degree in range(4):
        assert restricted.homogeneous_part(degree).is_zero()
    assert not restricted.homogeneous_part(4).is_zero()


def test_degenerate_shift_uses_symbolic_kernel():
    # sending both forgotten points to one kept point makes two weights zero
    spec = ForgottenSpec((-1, -1, 0), (1, 1))
    series = forgotten_series(spec, 4)
    for d in [(1, 1, 0), (2, 0, 0), (2, 1, 1), (0, 0, 4)]:
        assert forgotten_integral_direct(spec, d) == series.coefficient(d)


def test_direct_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        forgotten_integral_direct(ForgottenSpec((1, 1, -2), (0,)), (1, 1, 0))
