from fractions import Fraction

import gmpy2
import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from hardylab.errors import InputError
from hardylab.numeric import (
    Enclosure,
    PowerSum,
    RoundDown,
    RoundUp,
    decimal_string,
    get_precision,
    rpow_bound,
    to_exponent,
    to_rational,
    working_precision,
)

fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=1000)
positive = st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=1000)


def test_to_rational_parses_strings_floats_and_fractions():
    assert to_rational("3/4") == mpq(3, 4)
    assert to_rational("-2.5") == mpq(-5, 2)
    assert to_rational(0.5) == mpq(1, 2)
    assert to_rational(Fraction(7, 3)) == mpq(7, 3)
    assert to_rational(0.1) == mpq(*(0.1).as_integer_ratio())


@pytest.mark.parametrize("bad", ["abc", "1/0", float("nan"), True, None])
def test_to_rational_rejects_garbage(bad):
    with pytest.raises(InputError):
        to_rational(bad)


def test_exponents_read_decimals_literally():
    assert to_exponent(1.1) == Fraction(11, 10)
    assert to_exponent("1.5") == Fraction(3, 2)


def test_precision_env_and_context(monkeypatch):
    monkeypatch.setenv("HARDYLAB_PRECISION", "200")
    assert get_precision() == 200
    with working_precision(300):
        assert get_precision() == 300
    monkeypatch.setenv("HARDYLAB_PRECISION", "20")
    with pytest.raises(InputError):
        get_precision()
    monkeypatch.delenv("HARDYLAB_PRECISION")
    assert get_precision() == 128
    with pytest.raises(InputError):
        with working_precision(10):
            pass


@given(positive, st.sampled_from([Fraction(1, 2), Fraction(3, 2), Fraction(11, 10), Fraction(7, 3), Fraction(-5, 2)]))
def test_rpow_bounds_bracket_the_true_power(x, q):
    lo = rpow_bound(mpq(x), q, RoundDown)
    hi = rpow_bound(mpq(x), q, RoundUp)
    with mpmath.workdps(80):
        true = mpmath.mpf(x.numerator) / x.denominator
        true = true ** (mpmath.mpf(q.numerator) / q.denominator)
        assert mpmath.mpf(str(lo)) <= true * (1 + mpmath.mpf(2) ** -200)
        assert mpmath.mpf(str(hi)) >= true * (1 - mpmath.mpf(2) ** -200)
    assert lo <= hi


def test_integer_powers_of_rationals_are_exact():
    assert rpow_bound(mpq(2, 3), Fraction(3), RoundDown) == mpq(8, 27)
    assert rpow_bound(mpq(2, 3), Fraction(-2), RoundUp) == mpq(9, 4)


@given(fractions, fractions, fractions, fractions)
def test_enclosure_arithmetic_contains_exact_results(a, b, c, d):
    x = Enclosure(mpq(min(a, b)), mpq(max(a, b)))
    y = Enclosure(mpq(min(c, d)), mpq(max(c, d)))
    for u in (a, b):
        for v in (c, d):
            assert (x + y).contains(mpq(u + v))
            assert (x - y).contains(mpq(u - v))
            assert (x * y).contains(mpq(u * v))
            if not (y.lo <= 0 <= y.hi):
                assert (x / y).contains(mpq(u / v))


def test_empty_enclosure_rejected():
    with pytest.raises(ValueError):
        Enclosure(mpq(2), mpq(1))


@given(st.lists(st.tuples(st.integers(0, 10**6), st.integers(1, 10**6)), max_size=40),
       st.sampled_from([Fraction(2), Fraction(3, 2), Fraction(1), Fraction(5, 2)]))
def test_power_sum_encloses_exact_total(terms, q):
    acc = PowerSum(exact_bits=64)  # force the float path early
    for num, den in terms:
        if num:
            acc.add_pow(num, den, q)
    r = acc.result()
    with mpmath.workdps(80):
        e = mpmath.mpf(q.numerator) / q.denominator
        true = mpmath.fsum(mpmath.mpf(n) / d for n, d in terms if n) if q == 1 else \
            mpmath.fsum((mpmath.mpf(n) / d) ** e for n, d in terms if n)
        tol = abs(true) * mpmath.mpf(2) ** -250
        assert mpmath.mpf(str(r.lo)) <= true + tol
        assert mpmath.mpf(str(r.hi)) >= true - tol


def test_power_sum_stays_exact_for_small_integer_powers():
    acc = PowerSum()
    for n in range(1, 20):
        acc.add_pow(1, n, Fraction(2))
    r = acc.result()
    assert r.is_exact
    assert r.lo == sum(mpq(1, n * n) for n in range(1, 20))


def test_bulk_rounded_ratios_match_single_adds():
    a, b = PowerSum(exact_bits=0), PowerSum(exact_bits=0)
    nums, dens = list(range(1, 200)), [k * k + 1 for k in range(1, 200)]
    for x, y in zip(nums, dens):
        a.add_ratio(x, y)
    b.add_rounded_ratios(nums, dens)
    ra, rb = a.result(), b.result()
    assert ra.overlaps(rb)
    exact = sum(mpq(x, y) for x, y in zip(nums, dens))
    assert rb.contains(exact) and ra.contains(exact)


def test_decimal_strings_round_outward():
    third = mpq(1, 3)
    lo = decimal_string(third, RoundDown, 10)
    hi = decimal_string(third, RoundUp, 10)
    assert Fraction(lo) < Fraction(1, 3) < Fraction(hi)
    assert decimal_string(mpq(0)) == "0"
    assert decimal_string(gmpy2.mpfr(2)) in ("2e+0", "2")
