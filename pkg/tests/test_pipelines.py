import math
from fractions import Fraction

import pytest

from shiftlab.constructions.approx import approx_local_rule
from shiftlab.constructions.free_image import stage_gammas
from shiftlab.constructions.lemma16 import lemma16_pipeline
from shiftlab.constructions.lemma41 import (INSTANCES, distinguishes, e_set, instance, lemma41_csp,
                                            probability_audit, rho_f, solve)
from shiftlab.constructions.schedule import schedule_sets
from shiftlab.errors import StageFailure
from shiftlab.graphs import is_separated
from shiftlab.groups import GroupSubset, cyclic, power
from shiftlab.shift import DistinguishingSet, LocalRule, all_configurations


@pytest.fixture(scope="module", params=INSTANCES)
def solved(request):
    action, data, part = instance(request.param)
    res = lemma41_csp(action, data, part)
    solve(res, seed=1)
    return request.param, res


def test_structure_audits(solved):
    _, res = solved
    assert res.audits.passed, [a.name for a in res.audits.failures()]
    assert all(len(d) <= 2 for d in res.deltas)
    assert res.params.ord <= 2
    assert is_separated(res.action, res.Z, power(res.data.N, 4))


def test_sets_audits(solved):
    _, res = solved
    d = res.data
    assert d.audits.passed
    assert d.H <= (d.W * d.W) | (d.W * d.F * d.W)
    assert d.N.inverse() == d.N and d.group.identity in d.N


def test_rescan_every_point(solved):
    # independent of the audit log: recompute the distinguishing property
    _, res = solved
    d, X, f = res.data, res.action, res.f
    for x in X.points:
        gx = X.act(d.gamma, x)
        assert any(distinguishes(rho_f(X, d, f.get, X.act(s, x)), rho_f(X, d, f.get, X.act(s, gx)))
                   for s in d.S)


def test_e_sets(solved):
    _, res = solved
    d = res.data
    need = math.ceil(Fraction(len(d.M), 8 * len(d.D) ** 3 * len(d.R)))
    for z, beta, _ in res.keys:
        E, log = e_set(res, z, beta)
        assert log.passed and len(E) >= need


def test_probability_exact(solved):
    _, res = solved
    for i in range(len(res.keys)):
        rep = probability_audit(res, i)
        assert rep.audits.passed
        assert rep.p == rep.p_brute <= rep.p_E <= rep.bound_E


FROZEN_P = {"Z24": [Fraction(0)], "Z2xZ16": [Fraction(1, 21)]}


def test_frozen_probabilities(solved):
    name, res = solved
    if name in FROZEN_P:
        assert [probability_audit(res, i).p for i in range(len(res.keys))] == FROZEN_P[name]
    else:
        assert len(res.keys) == 6 and res.data.H.encode() == [0, 12] and res.data.Q.encode() == [0, 1]


def test_sampled_mode_is_deterministic(solved):
    _, res = solved
    a = probability_audit(res, 0, "sampled", samples=500, seed=4)
    b = probability_audit(res, 0, "sampled", samples=500, seed=4)
    assert a.estimate == b.estimate and a.audits.passed


# --- approximation on distinguishing sets ---------------------------------------


def test_approx_rule_on_z8():
    G = cyclic(8)
    rho = LocalRule.from_function(GroupSubset.of(G, [0, 1]), 2, 2, lambda p: (p[0] + p[1]) % 2)
    sched = schedule_sets("lemma43", G, None, GroupSubset.of(G, [0]), 7, allow_truncate=True)
    gs = [g for g in G.elements() if g]
    fam = [DistinguishingSet(e.S, tuple(b), 2) for e, b in zip(sched.entries, stage_gammas(sched, gs))]
    configs = all_configurations(G, 2)
    rep = approx_local_rule(G, 2, fam, rho, GroupSubset.of(G, [0]), len(fam), configs=configs)
    assert rep.audits.passed
    # on members of Z* the new rule agrees with the old one
    Wl = list(rho.window)
    for row in configs:
        pat = tuple(int(v) for v in row[Wl])
        if pat in rep.rule.table:
            assert rep.rule(pat) == rho(pat)


# --- the stabilizer realisation pipeline ------------------------------------------


@pytest.mark.parametrize("n", [12, 16])
def test_lemma16_on_cyclic(n):
    G = cyclic(n)
    rho = LocalRule.from_function(GroupSubset.of(G, [0]), 2, 2, lambda p: p[0])
    rep = lemma16_pipeline(G, 2, rho, t0=[0, n // 2])
    assert rep.audits.passed, [a.name for a in rep.audits.failures()]
    assert rep.ell == len(rep.F) + 4
    assert rep.stabilizer == [0]
    A = rep.audits
    assert A.get("stage4.A_B_disjoint").status == "pass"
    assert A.get("stage5.case_outside").status == "pass"
    assert A.get("stage5.case_inside").status == "pass"


def test_lemma16_reports_small_surrogate():
    G = cyclic(12)
    rho = LocalRule.from_function(GroupSubset.of(G, [0]), 2, 2, lambda p: p[0])
    with pytest.raises(StageFailure) as exc:
        lemma16_pipeline(G, 2, rho)
    assert exc.value.stage == "stage 2"
    assert exc.value.report.audits.get("stage2.T1_large").status == "fail"
