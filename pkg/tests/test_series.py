from fractions import Fraction
from math import comb

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from kronloc.series import (
    PhiSpec,
    SeriesError,
    TruncatedSeries,
    asymptotic_coeff_estimate,
    big_ln,
    growth_estimates,
    lagrange_composition_coeff,
    lagrange_power_coeff,
    parse_phi,
    solve_functional,
    tree_family_coeff,
    x0_inverse,
)

series_lists = st.lists(st.integers(-5, 5), min_size=1, max_size=8)


def _naive_mul(a, b, n):
    return [sum(a[i] * b[k - i] for i in range(k + 1) if i < len(a) and k - i < len(b))
            for k in range(n + 1)]


@given(series_lists, series_lists)
def test_product_matches_schoolbook(a, b):
    n = min(len(a), len(b)) - 1
    got = (TruncatedSeries(tuple(a)) * TruncatedSeries(tuple(b))).to_list()
    assert got == _naive_mul(a, b, n)


@given(series_lists, st.integers(0, 4))
def test_power_is_repeated_product(a, k):
    s = TruncatedSeries(tuple(a))
    acc = TruncatedSeries.from_list([1], s.order)
    for _ in range(k):
        acc = acc * s
    assert s**k == acc


def test_truncation_guards():
    s = TruncatedSeries((1, 2, 3))
    assert s[2] == 3 and s[-1] == 0
    with pytest.raises(SeriesError):
        s[3]
    with pytest.raises(SeriesError):
        s.truncate(5)
    with pytest.raises(SeriesError):
        s.compose(TruncatedSeries((1, 1)))


def test_parse_phi():
    assert parse_phi("1+x^2") == PhiSpec.binomial(1, 2)
    assert parse_phi("(1 + 2x^3)^4") == PhiSpec.binomial(2, 3, 4)
    assert parse_phi("1+x+x^2").dense == (1, 1, 1)
    assert parse_phi("(1+x+x^2)^2").dense == (1, 2, 3, 2, 1)
    for bad in ["", "1+", "x^", "1+y", "0+x^2", "(1+x^2)^"]:
        with pytest.raises(SeriesError):
            parse_phi(bad)


def _catalan(k):
    return comb(2 * k, k) // (k + 1)


def test_solve_functional_catalan_and_motzkin():
    y = solve_functional(parse_phi("1+x^2"), 9).to_list()
    assert y == [0, 1, 0, 1, 0, 2, 0, 5, 0, 14]
    assert all(y[2 * k + 1] == _catalan(k) for k in range(5))
    motz = solve_functional(parse_phi("1+x+x^2"), 8).to_list()
    assert motz == [0, 1, 1, 2, 4, 9, 21, 51, 127]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 4), st.integers(1, 18))
def test_power_coeff_matches_fixed_point(a, b, m, n):
    y = solve_functional(PhiSpec.binomial(a, b), 18)
    assert lagrange_power_coeff(a, b, m, n) == (y**m)[n]


@pytest.mark.parametrize("m", [3, 4])
def test_tree_family_coeff(m):
    phi = PhiSpec.binomial(1, m - 1, m - 1)
    y = solve_functional(phi, 16) ** m
    assert all(tree_family_coeff(m, n) == y[n] for n in range(1, 17))


def test_composition_coeff():
    phi = parse_phi("1+x+x^2")
    g = TruncatedSeries((0, 0, 1, 0, 0, 0, 0))
    y = solve_functional(phi, 6)
    assert lagrange_composition_coeff(g, phi, 6) == Fraction((y * y)[6])
    with pytest.raises(SeriesError, match="order"):
        lagrange_composition_coeff(TruncatedSeries((0, 1)), phi, 4)


@given(st.integers(1, 10**40))
def test_big_ln_matches_mpmath(n):
    with mpmath.workdps(80):
        ref = mpmath.log(n)
    assert abs(big_ln(n) - ref) < mpmath.mpf(10) ** -55 * max(1, abs(ref))


def test_big_ln_huge():
    n = 3**100000
    with mpmath.workdps(64):
        assert abs(big_ln(n) - 100000 * mpmath.log(3)) < mpmath.mpf(10) ** -50


def test_x0():
    assert x0_inverse(1, 2).value == 2
    assert x0_inverse(2, 2).value == pytest.approx(4 / 2**0.5 * 1, rel=1e-12)
    with pytest.raises(SeriesError):
        x0_inverse(1, 1)


def test_asymptotics():
    est = asymptotic_coeff_estimate((1, 2), 41)
    exact = lagrange_power_coeff(1, 2, 1, 41)
    assert abs(est / exact - 1) < 0.05
    assert asymptotic_coeff_estimate((1, 2), 40) == 0
    g = growth_estimates(1, 2, 200)
    assert g.n == 199
    assert abs(g.corrected_ratio - 2) < abs(g.plain_ratio - 2)
    assert abs(g.corrected_log - mpmath.log(2)) < abs(g.plain_log - mpmath.log(2))
