import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shiftlab.actions import PointFunction, shift_action, translation_action
from shiftlab.errors import CapExceeded, DomainError
from shiftlab.groups import GroupSubset, cyclic, dihedral, direct_product
from shiftlab.shift import (SFT, Configuration, LocalRule, all_configurations, coding_map,
                            coding_matrix, col_membership_rows, free_part, free_part_action,
                            is_proper_on_schreier, map_of_rule, map_stabilizer, prop15_rule,
                            rule_of_map, sft_col, sft_membership, sft_membership_rows, sft_xh, shift,
                            stabilizer)


def C(G, vals, k=2):
    return Configuration.of(G, k, vals)


def naive_shift(G, g, vals):
    return tuple(vals[G.mul(d, g)] for d in G.elements())


def test_shift_formula():
    Z4 = cyclic(4)
    assert shift(1, C(Z4, [0, 1, 0, 0])).values == (1, 0, 0, 0)
    x = C(Z4, [0, 1, 1, 0])
    assert shift(0, x) == x


def test_stabilizers():
    Z4 = cyclic(4)
    assert stabilizer(C(Z4, [0, 1, 0, 1])).encode() == [0, 2]
    assert len(stabilizer(C(Z4, [1, 1, 1, 1]))) == 4
    assert stabilizer(C(Z4, [0, 1, 1, 0])).encode() == [0]


def test_free_part_sizes():
    assert len(free_part(cyclic(3), 2)) == 6
    assert len(free_part(cyclic(4), 2)) == 12
    assert len(free_part(cyclic(4), 1)) == 0


def test_configuration_validation():
    with pytest.raises(DomainError):
        C(cyclic(3), [0, 2, 0])
    with pytest.raises(DomainError):
        C(cyclic(3), [0, 1])


def test_cap_is_enforced():
    with pytest.raises(CapExceeded):
        all_configurations(cyclic(30), 2)


def test_col_examples():
    Z5 = cyclic(5)
    pm = GroupSubset.of(Z5, [1, 4])
    every = sft_col(GroupSubset.of(Z5, []), 2)
    assert all(sft_membership(every, C(Z5, v)) for v in itertools.product(range(2), repeat=5))
    assert not sft_membership(sft_col(pm, 2), C(Z5, [0, 1, 0, 1, 0]))
    assert sft_membership(sft_col(pm, 3), C(Z5, [0, 1, 0, 1, 2], 3))
    with pytest.raises(DomainError):
        sft_col(GroupSubset.of(Z5, [0, 1, 4]), 3)
    with pytest.raises(DomainError):
        sft_col(GroupSubset.of(Z5, [1]), 3)


def test_xh_membership():
    Z6 = cyclic(6)
    x = C(Z6, [0, 1, 1, 0, 1, 1])
    assert sft_membership(sft_xh(GroupSubset.of(Z6, [0, 3]), 2), x)
    assert not sft_membership(sft_col(GroupSubset.of(Z6, [1, 5]), 2), x)
    empty = SFT(GroupSubset.of(Z6, [0]), 2, frozenset())
    assert not sft_membership(empty, x)


def test_coding_map_examples():
    Z4 = cyclic(4)
    act = translation_action(Z4)
    f = PointFunction(act, np.array([0, 0, 1, 0]), 2)
    assert coding_map(act, f, 0).values == (0, 0, 1, 0)
    X = free_part_action(Z4, 2)
    ev = LocalRule.from_function(GroupSubset.of(Z4, [0]), 2, 2, lambda p: p[0])
    fe = ev.point_function(X)
    assert all(coding_map(X, fe, x).values == tuple(X.labels[x]) for x in X.points)


def test_map_stabilizer_examples():
    Z4, Z6 = cyclic(4), cyclic(6)
    X = free_part_action(Z4, 2)
    const = PointFunction(X, np.zeros(X.n, dtype=int), 2)
    assert len(map_stabilizer(X, const)) == 4
    ev = LocalRule.from_function(GroupSubset.of(Z4, [0]), 2, 2, lambda p: p[0]).point_function(X)
    assert map_stabilizer(X, ev).encode() == [0]
    X6 = free_part_action(Z6, 2)
    H = GroupSubset.of(Z6, [0, 3])
    assert map_stabilizer(X6, prop15_rule(H, 2).point_function(X6)) == H


def test_prop15_rule_values():
    Z6 = cyclic(6)
    rule = prop15_rule(GroupSubset.of(Z6, [0, 3]), 2)
    assert rule.on_configuration(C(Z6, [0, 1, 1, 1, 1, 1])) == 0
    assert rule.on_configuration(C(Z6, [1] * 6)) == 1
    X = free_part_action(Z6, 2)
    imgs = coding_matrix(X, rule.point_function(X))
    assert sft_membership_rows(sft_xh(GroupSubset.of(Z6, [0, 3]), 2), imgs).all()
    with pytest.raises(DomainError):
        prop15_rule(GroupSubset.of(Z6, [0, 1]), 2)


def test_map_rule_round_trip():
    Z5 = cyclic(5)
    X = free_part_action(Z5, 2)
    rng = np.random.default_rng(0)
    for _ in range(10):
        f = PointFunction(X, rng.integers(0, 3, X.n), 3)
        assert rule_of_map(X, map_of_rule(X, f)).tolist() == f.tolist()
    const = PointFunction(X, np.ones(X.n, dtype=int), 2)
    assert all(set(c.values) == {1} for c in map_of_rule(X, const))


def test_rule_of_map_rejects_non_equivariant():
    Z4 = cyclic(4)
    X = free_part_action(Z4, 2)
    images = [C(Z4, [0, 0, 0, 1]) for _ in X.points]
    with pytest.raises(DomainError):
        rule_of_map(X, images)


# --- exhaustive and property checks ---------------------------------------------

GROUPS = [cyclic(5), cyclic(6), dihedral(3), direct_product(cyclic(2), cyclic(2))]


@pytest.mark.parametrize("G", GROUPS)
def test_action_laws_on_full_shift(G):
    X = shift_action(G, all_configurations(G, 2), 2)
    assert X.verify()
    for g in G.elements():
        for x in X.points:
            assert tuple(X.labels[X.act(g, x)]) == naive_shift(G, g, X.labels[x])


@pytest.mark.parametrize("G", GROUPS)
def test_coding_map_equivariant(G):
    X = free_part_action(G, 2)
    rng = np.random.default_rng(1)
    f = PointFunction(X, rng.integers(0, 3, X.n), 3)
    for g in G.elements():
        for x in X.points:
            assert coding_map(X, f, X.act(g, x)) == shift(g, coding_map(X, f, x))


@pytest.mark.parametrize("G", GROUPS)
def test_stabilizers_are_subgroups(G):
    for row in all_configurations(G, 2):
        H = stabilizer(C(G, row))
        assert all(G.mul(a, G.inv(b)) in H for a in H for b in H)


@given(st.integers(0, 2**6 - 1), st.integers(0, 5), st.integers(0, 5))
def test_shift_composition(code, g, h):
    Z6 = cyclic(6)
    x = C(Z6, [(code >> i) & 1 for i in range(6)])
    assert shift(g, shift(h, x)) == shift(Z6.mul(g, h), x)


@given(st.data())
@settings(max_examples=40)
def test_properness_matches_col_membership(data):
    G = data.draw(st.sampled_from([cyclic(5), cyclic(6), dihedral(3)]))
    F = GroupSubset.of(G, [1, G.inv(1)])
    X = translation_action(G)
    ell = data.draw(st.integers(2, 3))
    vals = data.draw(st.lists(st.integers(0, ell - 1), min_size=G.order, max_size=G.order))
    f = PointFunction(X, np.array(vals), ell)
    rows = coding_matrix(X, f)
    via_sft = bool(sft_membership_rows(sft_col(F, ell), rows).all())
    assert is_proper_on_schreier(X, F, f) == via_sft == bool(col_membership_rows(F, rows).all())


@given(st.lists(st.integers(0, 2), min_size=6, max_size=6))
def test_map_stabilizer_normal_on_free_part(vals):
    G = dihedral(3)
    X = free_part_action(G, 2)
    W = GroupSubset.of(G, [0, 1, 3])
    table = {p: vals[i % 6] for i, p in enumerate(itertools.product(range(2), repeat=3))}
    f = LocalRule(W, 2, 3, table).point_function(X)
    H = map_stabilizer(X, f)
    assert all(G.conj(g, h) in H for g in G.elements() for h in H)
