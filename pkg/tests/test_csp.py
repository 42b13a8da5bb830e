import itertools
import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from helpers import naive_params, naive_solutions
from shiftlab.corpus import random_csp
from shiftlab.csp import (CSP, UNSAT, Constraint, all_solutions, backtracking, brute_force,
                          compute_params, constraint_probability, list_reduction,
                          reduced_probability)
from shiftlab.errors import CapExceeded, DomainError


def neq(u, v, q):
    return Constraint.of([u, v], [(c, c) for c in range(q)])


def cycle_csp(n, q):
    return CSP(range(n), q, [neq(i, (i + 1) % n, q) for i in range(n)])


def test_probability_examples():
    csp = CSP([0, 1], 2, [Constraint.of([0, 1], [(0, 1)])])
    assert constraint_probability(csp.constraints[0], csp) == Fraction(1, 4)
    full = Constraint.of([0, 1], list(itertools.product(range(2), repeat=2)))
    assert constraint_probability(full, csp) == 1
    lists = CSP(["x", "y"], {"x": [0, 1], "y": [0, 1, 2]}, [Constraint.of(["x", "y"], [(1, 2)])])
    assert constraint_probability(lists.constraints[0], lists) == Fraction(1, 6)


def test_param_examples():
    one = CSP(range(3), 2, [Constraint.of([0, 1, 2], [(0, 0, 0)])])
    assert compute_params(one).d == 0 and compute_params(one).vdeg == 1 and compute_params(one).ord == 3
    two = CSP(range(3), 2, [Constraint.of([0, 1], [(0, 0)]), Constraint.of([1, 2], [(0, 0)])])
    assert compute_params(two).d == 1
    P = compute_params(cycle_csp(5, 3))
    assert (P.p, P.d, P.vdeg, P.ord) == (Fraction(1, 3), 2, 2, 2)


def test_validation():
    with pytest.raises(DomainError):
        Constraint.of([], [])
    with pytest.raises(DomainError):
        Constraint.of([0, 0], [(0, 0)])
    with pytest.raises(DomainError):
        CSP([0], {0: []})
    with pytest.raises(DomainError):
        CSP([0], 2, [Constraint.of([1], [(0,)])])


def test_brute_force_examples():
    assert brute_force(CSP([0], 3, [Constraint.of([0], [(0,), (1,), (2,)])])) == UNSAT
    assert brute_force(cycle_csp(5, 2)) == UNSAT
    sol = brute_force(cycle_csp(5, 3))
    assert sol == {0: 0, 1: 1, 2: 0, 3: 1, 4: 2}
    assert len(all_solutions(cycle_csp(5, 3))) == 30
    with pytest.raises(CapExceeded):
        brute_force(CSP(range(30), 3))


def test_backtracking_agrees():
    assert backtracking(cycle_csp(7, 2)) == UNSAT
    sol = backtracking(cycle_csp(7, 3))
    assert cycle_csp(7, 3).is_solution(sol)


def test_list_reduction_examples():
    csp = CSP(["a", "b"], {"a": [0, 1], "b": [0, 1, 2]}, [Constraint.of(["a", "b"], [(1, 1)])])
    red = list_reduction(csp)
    assert red.n == 6
    assert Counter(red.h("a", phi) for phi in range(6)) == {0: 3, 1: 3}
    assert Counter(red.h("b", phi) for phi in range(6)) == {0: 2, 1: 2, 2: 2}
    uni = list_reduction(CSP([0], 2, []))
    assert [uni.h(0, i) for i in range(2)] == [0, 1]


def test_list_reduction_round_trip_three_variables():
    csp = CSP([0, 1, 2], {0: [0, 1], 1: [0, 1, 2], 2: [2]},
              [neq(0, 1, 3), Constraint.of([1, 2], [(2, 2)])])
    red = list_reduction(csp)
    reduced = Counter(tuple(sorted(red.decode(a).items())) for a in naive_solutions(red.csp))
    original = naive_solutions(csp)
    assert set(reduced) == {tuple(sorted(a.items())) for a in original}
    assert set(reduced.values()) == {red.multiplicity()} == {3 * 2 * 6}


def _naive_reduced_probability(red, i):
    c = red.csp.constraints[i]
    bad = sum(c.violated_by(v) for v in itertools.product(range(red.n), repeat=len(c.domain)))
    return Fraction(bad, red.n ** len(c.domain))


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_reduction_preserves_probabilities(seed):
    csp = random_csp(random.Random(seed), max_vars=4, max_colors=4, max_arity=2, lists=True)
    red = list_reduction(csp)
    for i, c in enumerate(csp.constraints):
        p = constraint_probability(c, csp)
        assert reduced_probability(red, i) == p == _naive_reduced_probability(red, i)


@given(st.integers(0, 10**6), st.booleans())
@settings(max_examples=100, deadline=None)
def test_params_match_definitions(seed, lists):
    csp = random_csp(random.Random(seed), lists=lists)
    P = compute_params(csp)
    assert (P.p, P.d, P.vdeg, P.ord) == naive_params(csp)


@given(st.integers(0, 10**6))
@settings(max_examples=100, deadline=None)
def test_brute_force_is_first_solution(seed):
    csp = random_csp(random.Random(seed), lists=True)
    sols = naive_solutions(csp)
    got = brute_force(csp)
    assert got == (sols[0] if sols else UNSAT)
    bt = backtracking(csp)
    assert (bt == UNSAT) == (got == UNSAT)
    if bt != UNSAT:
        assert csp.is_solution(bt)


def test_json_round_trip():
    csp = cycle_csp(4, 3)
    again = CSP.from_json(csp.to_json())
    assert again.to_json() == csp.to_json()
