import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf

from shiftlab.corpus import random_csp, random_lll_csp
from shiftlab.csp import CSP, UNSAT, Constraint, LLLParams, brute_force, compute_params
from shiftlab.lll import (E_LOWER, E_UPPER, check_continuous_lll, check_symmetric_lll, e_enclosure,
                          moser_tardos, uniform_index)


def params(p, d, vdeg=1, order=1):
    return LLLParams(Fraction(p), d, vdeg, order)


def test_symmetric_examples():
    assert check_symmetric_lll(params(Fraction(1, 4), 0)).status == "pass"
    assert check_symmetric_lll(params(1, 5)).status == "fail"
    v = check_symmetric_lll(params(Fraction(1, 8), 2))
    assert v.status == "fail" and v.margin < 0


def test_continuous_examples():
    assert check_continuous_lll(params(Fraction(1, 4), 0, 1, 2)).status == "pass"
    assert check_continuous_lll(params(Fraction(1, 4), 0, 2, 2)).status == "fail"


def test_e_enclosures():
    with mp.workdps(60):
        e = +mp.e
        assert mpf(E_LOWER.numerator) / E_LOWER.denominator < e < mpf(E_UPPER.numerator) / E_UPPER.denominator
        for t in (10, 20, 40):
            lo, hi = e_enclosure(t)
            assert mpf(lo.numerator) / lo.denominator < e < mpf(hi.numerator) / hi.denominator


def test_symmetric_refines_near_gap():
    # x just below 1/e: the stored interval cannot decide, the series can
    x = Fraction(1) / Fraction(27182818284_5, 10**11)
    v = check_symmetric_lll(LLLParams(x, 0, 1, 1))
    assert v.status in ("pass", "fail")
    with mp.workdps(50):
        assert (v.status == "pass") == (mp.e * mpf(x.numerator) / x.denominator <= 1)


def _oracle_symmetric(P):
    with mp.workdps(80):
        return "pass" if mp.e * mpf(P.p.numerator) / P.p.denominator * (P.d + 1) <= 1 else "fail"


@given(st.integers(0, 10**6))
@settings(max_examples=100, deadline=None)
def test_verdicts_match_high_precision(seed):
    csp = random_csp(random.Random(seed), max_vars=6, max_colors=4)
    P = compute_params(csp)
    assert check_symmetric_lll(csp).status == _oracle_symmetric(P)
    assert check_continuous_lll(csp).passed == (P.p * P.vdeg ** P.ord < 1)


def test_uniform_index_range_and_determinism():
    draws = [uniform_index(5, 0, i, 7) for i in range(2000)]
    assert all(0 <= d < 7 for d in draws)
    assert draws == [uniform_index(5, 0, i, 7) for i in range(2000)]
    assert set(draws) == set(range(7))
    big = 2**200 + 17
    assert 0 <= uniform_index(1, 2, 3, big) < big


def test_moser_tardos_examples():
    empty = CSP(range(4), 3)
    rep = moser_tardos(empty, 0)
    assert rep.status == "solved" and rep.resamples == 0
    cyc = CSP(range(5), 3, [Constraint.of([i, (i + 1) % 5], [(c, c) for c in range(3)]) for i in range(5)])
    rep = moser_tardos(cyc, 11)
    assert all(rep.assignment[i] != rep.assignment[(i + 1) % 5] for i in range(5))


def test_budget_exhaustion_is_reported():
    unsat = CSP(range(5), 2, [Constraint.of([i, (i + 1) % 5], [(0, 0), (1, 1)]) for i in range(5)])
    rep = moser_tardos(unsat, 0, max_resamples=50)
    assert rep.status == "budget_exhausted" and rep.assignment is None


def test_moser_tardos_deterministic():
    csp = random_lll_csp(random.Random(3))
    a, b = moser_tardos(csp, 9), moser_tardos(csp, 9)
    assert a.to_json() == b.to_json()


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_lll_instances_are_solved(seed):
    csp = random_lll_csp(random.Random(seed))
    assert check_symmetric_lll(csp).passed
    rep = moser_tardos(csp, seed)
    assert rep.status == "solved" and csp.is_solution(rep.assignment)


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_never_contradicts_brute_force(seed):
    csp = random_csp(random.Random(seed), lists=seed % 2 == 0)
    rep = moser_tardos(csp, seed, max_resamples=2000)
    truth = brute_force(csp)
    if rep.status == "solved":
        assert truth != UNSAT and csp.is_solution(rep.assignment)
    else:
        assert rep.assignment is None
