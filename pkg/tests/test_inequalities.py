from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from hardylab import inequalities as ineq
from hardylab.errors import InputError
from hardylab.inequalities import (
    CHECKS,
    FAIL,
    GENERATORS,
    INCONCLUSIVE,
    PASS,
    CheckReport,
    GeneratorSpec,
    check_chain_sharper,
    check_fkp,
    check_lemma_rearrangement,
    check_lemma_weighted_average,
    check_prop31,
    check_thm32,
    check_thm33,
    check_thm35,
    check_thm36,
    check_thm41,
    decide,
    hardy_constant,
    parse_checks,
    run_suite,
)
from hardylab.numeric import Enclosure
from hardylab.seqcore import from_values
from hardylab.weights import LINEAR, WeightSpec

ints = st.lists(st.integers(-5, 5), min_size=1, max_size=12)


def E(lo, hi=None):
    return Enclosure(mpq(lo), mpq(hi if hi is not None else lo))


def test_decide_semantics():
    assert decide(E(1, 2), E(3, 4)) == PASS
    assert decide(E(5, 6), E(3, 4)) == FAIL
    assert decide(E(1, 3), E(2, 4)) == INCONCLUSIVE
    assert decide(E(1, 3), E(2, 4), certificate=True) == PASS
    assert decide(E(1, 3), E(2, 4), certificate=False) == FAIL
    # equality resolved to enclosure width
    assert decide(E(1, 1 + Fraction(1, 10**12)), E(1, 1 + Fraction(1, 10**12))) == PASS


def test_hardy_constant():
    assert hardy_constant(2).contains(4)
    c = hardy_constant(Fraction(3, 2))
    assert c.lo <= 3**1.5 + 1e-12 and c.hi >= 3**1.5 - 1e-12


@given(ints, st.sampled_from([1, Fraction(3, 2), 2, 3]))
def test_rearrangement_lemma(vals, p):
    assert check_lemma_rearrangement(from_values(vals), p).verdict == PASS


@given(st.lists(st.integers(0, 9), min_size=1, max_size=10), st.data())
def test_weighted_average_lemma(raw, data):
    a = sorted(raw, reverse=True)
    m = data.draw(st.integers(1, len(a) + 2))
    n = data.draw(st.integers(1, m))
    w = data.draw(st.sampled_from([LINEAR, WeightSpec.power(3), WeightSpec.power(Fraction(9, 8))]))
    assert check_lemma_weighted_average(a, w, n, m).verdict == PASS


@given(ints, st.integers(1, 15), st.sampled_from([1, Fraction(3, 2), 2]),
       st.sampled_from([LINEAR, WeightSpec.power(2), WeightSpec.power(Fraction(11, 8))]))
def test_sup_bound_by_rearranged_average(vals, n, p, w):
    assert check_prop31(from_values(vals), p, w, n).verdict == PASS


@given(ints, st.sampled_from([Fraction(11, 10), 2, 5]))
def test_improved_hardy_and_gradient_forms(vals, p):
    seq = from_values(vals)
    assert check_thm32(seq, p).verdict == PASS
    assert check_thm33(seq, p).verdict == PASS
    assert check_chain_sharper(seq, p).verdict == PASS


@given(ints, st.sampled_from([2, 3]))
def test_series_improved_forms(vals, p):
    seq = from_values(vals)
    assert check_thm35(seq, p).verdict == PASS
    assert check_thm36(seq, p).verdict == PASS
    assert check_fkp(seq, p).verdict == PASS


def test_series_forms_need_integer_p():
    with pytest.raises(InputError):
        check_thm35(from_values([1]), Fraction(5, 2))


@given(ints, st.sampled_from([Fraction(3, 2), 2, 3]))
def test_uncertainty_bound(vals, p):
    assert check_thm41(from_values(vals), p, truncation=200).verdict == PASS


def test_uncertainty_point_mass_anchor():
    rep = check_thm41(from_values([1]), 2)
    suffix = rep.links[0] if rep.links else rep
    assert rep.verdict == PASS
    assert suffix.lhs.contains(Fraction(1, 2))


def test_failing_report_carries_witness():
    seq = from_values([1, 2])
    rep = ineq._report("x", Fraction(2), E(5), E(1), seq=seq)
    assert rep.verdict == FAIL and rep.witness == seq
    d = rep.to_json()
    assert d["witness"] == ["1", "2"] and d["verdict"] == FAIL


def test_parse_checks():
    assert parse_checks("all") == CHECKS
    assert parse_checks("thm41,lemma21,thm41") == ("thm41", "lemma21")
    with pytest.raises(InputError):
        parse_checks("thm99")


@pytest.mark.parametrize("kind", GENERATORS + ("mixed",))
def test_generators_are_deterministic_and_bounded(kind):
    g = GeneratorSpec(kind, 20, 3)
    for case in range(30):
        a, b = g.generate(case), g.generate(case)
        assert a == b and 1 <= a.N <= 20
    with pytest.raises(InputError):
        GeneratorSpec("gaussian")


def test_suite_is_deterministic_and_passes():
    gen = GeneratorSpec("mixed", 12, 11)
    a = run_suite(gen, cases=6, checks="all")
    b = run_suite(gen, cases=6, checks="all")
    assert a.exit_code == 0
    assert a.to_json() == b.to_json()
    assert all(s.failed == 0 for s in a.stats.values())


def test_suite_parallel_matches_serial():
    gen = GeneratorSpec("signed_integer", 10, 5)
    a = run_suite(gen, cases=8, checks="thm32,thm41", workers=2)
    b = run_suite(gen, cases=8, checks="thm32,thm41", workers=1)
    assert a.to_json() == b.to_json()


def test_suite_zero_cases_and_p_one_rules():
    assert run_suite(GeneratorSpec(), cases=0).exit_code == 0
    r = run_suite(GeneratorSpec(), p_grid=[1, 2], checks="lemma21", cases=3)
    assert r.stats["lemma21"].passed == 6
    with pytest.raises(InputError, match="p must exceed 1"):
        run_suite(GeneratorSpec(), p_grid=[1], checks="thm32", cases=1)


def _fake(verdict):
    def run_one(cfg, check, seq, p, case, rel_tol):
        return CheckReport(check, p, E(2), E(1) if verdict == FAIL else E(1, 3), verdict, witness=seq)
    return run_one


@pytest.mark.parametrize("verdict, code", [(FAIL, 1), (INCONCLUSIVE, 3)])
def test_suite_exit_codes(monkeypatch, verdict, code):
    monkeypatch.setattr(ineq, "_run_one", _fake(verdict))
    r = run_suite(GeneratorSpec(), p_grid=[2], checks="thm32", cases=2, retries=1)
    assert r.exit_code == code
    items = r.failures if verdict == FAIL else r.inconclusive
    assert len(items) == 2 and items[0]["witness"]
    if verdict == INCONCLUSIVE:
        assert r.stats["thm32"].retried == 2
