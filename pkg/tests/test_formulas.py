from fractions import Fraction
from math import comb

import mpmath
import pytest
from hypothesis import given, strategies as st

from kronloc.covering import enumerate_localization_data
from kronloc.formulas import (
    BoundResult,
    FormulaError,
    conjecture_f,
    douglas_constant,
    euler_34,
    euler_d_dplus1,
    euler_nn,
    euler_tree_family,
    exact_div,
    ln_chi_over_d,
    lower_bound_L,
)
from kronloc.quiver import kronecker_euler_form


def test_exact_div():
    assert exact_div(91, 7) == 13
    with pytest.raises(ArithmeticError):
        exact_div(10, 3)


@pytest.mark.parametrize("d,v", [(1, 3), (2, 13), (3, 68), (4, 399)])
def test_d_dplus1_values(d, v):
    res = euler_d_dplus1(3, d)
    assert res.value == v
    assert all(ok for _, ok in res.cross_checks)


def test_d_dplus1_rational_oracle():
    # the closed form evaluated in exact rationals, independent of exact_div
    for m in range(3, 7):
        for d in range(1, 15):
            q = Fraction(m, (d + 1) * ((m - 1) * d + m)) * comb((m - 1) ** 2 * d + (m - 1) * m, d)
            assert q.denominator == 1 and euler_d_dplus1(m, d).value == q


@pytest.mark.parametrize("m,d,e", [(3, 1, 2), (3, 2, 3), (4, 1, 2), (4, 2, 3), (3, 3, 4)])
def test_closed_form_against_census(m, d, e):
    rep = enumerate_localization_data(m, d, e)
    assert rep.total_chi == euler_d_dplus1(m, d).value


@pytest.mark.parametrize("m,d", [(3, 1), (3, 2), (3, 3), (4, 1), (4, 2)])
def test_tree_family_against_census(m, d):
    rep = enumerate_localization_data(m, d, (m - 1) * d + 1, type1_only=True)
    assert rep.total_chi == euler_tree_family(m, d)


def test_euler_34():
    assert euler_34(3).value == 68
    assert euler_34(4).value == 703
    assert comb(3, 4) == 0


@given(st.integers(3, 8), st.integers(1, 30))
def test_euler_bound(m, d):
    v = euler_d_dplus1(m, d).value
    assert v >= 1 - kronecker_euler_form(m, d, d + 1) + 1


def test_euler_nn():
    r = euler_nn(3, 2)
    assert r.value == 0 and r.cross_checks and all(ok for _, ok in r.cross_checks)
    r = euler_nn(4, 2)
    assert r.value == 0 and all(ok for _, ok in r.cross_checks)
    r = euler_nn(3, 5, cap=1000)
    assert r.value == 0 and "cap" in r.notes[0]
    with pytest.raises(FormulaError):
        euler_nn(3, 1)


def test_douglas_constant_and_f():
    k = douglas_constant(3)
    assert k == pytest.approx(4 * mpmath.log(4) - 3 * mpmath.log(3), rel=1e-30)
    assert float(k) == pytest.approx(2.2493, abs=1e-4)
    for m in range(3, 8):
        assert conjecture_f(m, 1) == douglas_constant(m)
    assert float(conjecture_f(3, Fraction(8, 5))) == pytest.approx(2.50476, abs=1e-5)
    with pytest.raises(FormulaError):
        conjecture_f(3, 3)


def test_lower_bound_worked_case():
    b = lower_bound_L(3, 5, 8)
    assert (b.a, b.K, b.d) == (1664, 12, 5)
    with mpmath.workdps(64):
        ref = mpmath.log(mpmath.mpf(1664) * mpmath.mpf(12) ** 12 / mpmath.mpf(11) ** 11) / 5
        assert abs(b.L - ref) <= abs(ref) * mpmath.mpf(10) ** -12
    assert b.recompute() == b.L
    assert BoundResult.from_json_obj(b.to_json_obj()) == b
    assert b.L <= conjecture_f(3, Fraction(8, 5))


def test_lower_bound_errors():
    with pytest.raises(FormulaError):
        lower_bound_L(3, 2, 4)


def test_growth_toward_k():
    assert abs(ln_chi_over_d(3, 300) - douglas_constant(3)) < 0.05
