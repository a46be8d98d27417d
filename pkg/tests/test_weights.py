import json
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardylab.errors import InputError
from hardylab.weights import (
    LINEAR,
    WeightSpec,
    leading_constant,
    vp_eval,
    vp_leading,
    vp_lower_bound_check,
    weighted_average_monotone_check,
)
from oracles import vp_mp


def test_parse_weight_strings(tmp_path):
    assert WeightSpec.parse("linear") == LINEAR
    assert WeightSpec.parse("power:3/2").exponent == Fraction(3, 2)
    assert WeightSpec.parse("power:1") == LINEAR
    f = tmp_path / "w.json"
    f.write_text(json.dumps([1, 2, 3.5, 5]))
    w = WeightSpec.parse(str(f))
    assert w.kind == "tabulated" and w.value(3) == Fraction(7, 2)
    with pytest.raises(InputError):
        WeightSpec.parse("quadratic")
    with pytest.raises(InputError):
        WeightSpec.tabulated([1, -1])


@pytest.mark.parametrize("beta, valid", [(1, True), (Fraction(3, 2), True), (3, True),
                                         (Fraction(1, 2), False), (0, False)])
def test_power_weight_validity(beta, valid):
    v = WeightSpec.power(beta).validate(50)
    assert bool(v) is valid


def test_invalid_power_weight_reports_a_violating_pair():
    v = WeightSpec.power(Fraction(1, 2)).validate(10)
    assert not v and v.witness == (1, 2)


def test_tabulated_validity_uses_adjacent_pairs():
    assert WeightSpec.tabulated([1, 2, 3, 5]).validate(4)
    v = WeightSpec.tabulated([1, 3, 4]).validate(3)  # w(3)/3 < w(2)/2
    assert not v and v.witness == (2, 3)
    assert not WeightSpec.tabulated([1, 2]).validate(5)


@given(st.fractions(min_value=0, max_value=50, max_denominator=9), st.integers(1, 40),
       st.sampled_from([LINEAR, WeightSpec.power(2), WeightSpec.power(Fraction(3, 2)),
                        WeightSpec.power(Fraction(7, 3))]))
def test_keys_order_like_the_true_ratio(s, m, w):
    num, den = s.numerator, s.denominator
    a, b = w.key(num, m)
    beta = w.exponent
    with mpmath.workdps(60):
        direct = (mpmath.mpf(num) / den / mpmath.mpf(m) ** (mpmath.mpf(beta.numerator) / beta.denominator))
        from_key = (mpmath.mpf(a) / b) ** (mpmath.mpf(1) / w.root) / den
        assert abs(direct - from_key) <= abs(direct) * mpmath.mpf(10) ** -50


@given(st.lists(st.integers(0, 20), min_size=1, max_size=15), st.data())
def test_weighted_average_monotone(raw, data):
    a = sorted(raw, reverse=True)
    m = data.draw(st.integers(1, len(a) + 3))
    n = data.draw(st.integers(1, m))
    w = data.draw(st.sampled_from([LINEAR, WeightSpec.power(2), WeightSpec.power(Fraction(5, 4))]))
    assert weighted_average_monotone_check(a, w, n, m)


def test_weighted_average_preconditions():
    with pytest.raises(InputError):
        weighted_average_monotone_check([1, 2], LINEAR, 1, 2)
    with pytest.raises(InputError):
        weighted_average_monotone_check([2, 1], LINEAR, 2, 1)
    with pytest.raises(InputError):
        weighted_average_monotone_check([2, 1], WeightSpec.power(Fraction(1, 2)), 1, 2)


@pytest.mark.parametrize("p", [Fraction(3, 2), 2, 3, 4, Fraction(11, 10)])
@pytest.mark.parametrize("n", [1, 2, 3, 10, 1000])
def test_vp_eval_encloses_reference(p, n):
    e = vp_eval(p, n)
    with mpmath.workdps(80):
        ref = vp_mp(mpmath.mpf(p.numerator if isinstance(p, Fraction) else p) /
                    (p.denominator if isinstance(p, Fraction) else 1), n)
        assert mpmath.mpf(str(e.lo)) <= ref * (1 + mpmath.mpf(10) ** -60)
        assert mpmath.mpf(str(e.hi)) >= ref * (1 - mpmath.mpf(10) ** -60)
    assert float(e.width) <= 1e-30


def test_vp_anchor_at_one_for_p_two():
    # v_2(1) = 1 - (sqrt 2 - 1) = 2 - sqrt 2
    e = vp_eval(2, 1)
    with mpmath.workdps(60):
        ref = 2 - mpmath.sqrt(2)
        assert mpmath.mpf(str(e.lo)) <= ref <= mpmath.mpf(str(e.hi))


def test_leading_constant():
    assert vp_leading(3) == Fraction(8, 27)
    assert vp_leading(Fraction(3, 2)) is None
    assert leading_constant(2).lo == Fraction(1, 4)


@pytest.mark.parametrize("p", [Fraction(3, 2), 2, 3])
def test_lower_bound_check_small_range(p):
    rep = vp_lower_bound_check(p, 2000)
    assert rep.passed and rep.min_ratio > 1 and rep.first_failure is None


def test_p_must_exceed_one():
    with pytest.raises(InputError, match="p must exceed 1"):
        vp_eval(1, 3)
