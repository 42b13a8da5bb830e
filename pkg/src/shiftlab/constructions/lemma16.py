"""Realising the stabilizer of a rule on proper colourings, end to end.

Stages:

1. witnesses a₀, a₁, A and (b_γ, σ_γ, B_γ) on the free part;
2. the finite sets T₀, T₁, D, the schedule, F and ℓ = |F| + 4;
3. the seeds J₀, J₁ and the colouring g on 𝔄 = A·J₀ ⊔ A·J₁;
4. the separated set K, its classes K_γ and the colouring h on 𝔅 = B·K;
5. the stagewise extension of g ∪ h and the final stabilizer checks.

The point set X is the shift-closure of a generated family of proper
colourings rather than all of Col(F, ℓ), which is far too large for any
group where the construction is non-degenerate.  The family contains the
colourings the argument needs (a J₀/J₁ pair for every γ outside AT₀²A and
colour-shifted colourings for K) plus a few seeded random ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..actions import PointFunction, shift_action
from ..audit import AuditLog
from ..errors import HypothesisFailure, StageFailure
from ..graphs import greedy_mis, is_syndetic, schreier_graph
from ..groups import FiniteGroup, GroupSubset, first_elements, power, symmetrize
from ..lll import uniform_index
from ..shift import (DistinguishingSet, LocalRule, coding_matrix, col_membership_rows,
                     map_stabilizer)
from .approx import approx_local_rule
from .free_image import free_image_coloring, stage_gammas
from .schedule import Schedule, ScheduleEntry, schedule_sets
from .witnesses import find_witnesses

TOPIC = "stabilizer realisation"


@dataclass
class Lemma16Report:
    F: GroupSubset | None = None
    ell: int | None = None
    sets: dict = field(default_factory=dict)
    sizes: dict = field(default_factory=dict)
    stabilizer: list | None = None
    failed_stage: str | None = None
    audits: AuditLog = field(default_factory=AuditLog)

    def to_json(self) -> dict:
        return {"F": None if self.F is None else self.F.encode(), "ell": self.ell,
                "sets": self.sets, "sizes": self.sizes, "stabilizer": self.stabilizer,
                "failed_stage": self.failed_stage, "audits": self.audits.to_json()}


def _grow(G: FiniteGroup, larger_than: int) -> GroupSubset:
    for r in range(1, G.order + 1):
        T = symmetrize(GroupSubset.of(G, first_elements(G, r)), True)
        if len(T) > larger_than:
            return T
    return symmetrize(GroupSubset.of(G, G.elements()), True)


def _greedy_colouring(G: FiniteGroup, F: GroupSubset, ell: int, fixed: dict, low: int,
                      choose=None) -> list[int]:
    """Proper colouring of the Cayley graph with the given values fixed and
    every other vertex coloured from ``{low, …, ℓ-1}``."""
    col = dict(fixed)
    for g in G.elements():
        if g in col:
            continue
        used = {col.get(G.mul(s, g)) for s in F}
        free = [c for c in range(low, ell) if c not in used]
        if not free:
            raise HypothesisFailure("ran out of colours")
        col[g] = free[0] if choose is None else free[choose(g, len(free))]
    return [col[g] for g in G.elements()]


def _fail(report: Lemma16Report, stage: str, message: str):
    report.failed_stage = stage
    exc = StageFailure(stage, message)
    exc.report = report
    raise exc


def lemma16_pipeline(G: FiniteGroup, k: int, rho: LocalRule, t0=None, t1=None, e_F: int = 1,
                     shifted_orbits: int | None = None, random_orbits: int = 2,
                     seed: int = 0) -> Lemma16Report:
    """Run stages 1-5 (see module docstring); raise :class:`StageFailure`
    with the partial report attached at the first failing stage."""
    rep = Lemma16Report()
    log = rep.audits
    # stage 1
    wit = find_witnesses(G, k, rho)
    log.extend(wit.audits, "stage1.")
    if not wit.audits.passed:
        _fail(rep, "stage 1", "witness search failed")
    A, stab = wit.A, wit.stab
    by_gamma = {w.gamma: w for w in wit.witnesses}
    # stage 2
    T0 = _grow(G, len(A)) if t0 is None else symmetrize(GroupSubset.of(G, t0), True)
    if not log.check("stage2.T0_larger_than_A", len(T0) > len(A), TOPIC,
                     witness={"T0": T0.encode(), "A": A.encode()}):
        _fail(rep, "stage 2", "|T0| <= |A|")
    AT = A * T0 * T0 * A
    classes = [g for g in AT if g not in stab]
    B = GroupSubset.of(G, [G.identity])
    for g in classes:
        B = B | by_gamma[g].B
    Wr = symmetrize(rho.window | GroupSubset.of(G, [G.identity]), True)
    D = Wr | A | B | stab
    T1 = _grow(G, len(T0) * len(B)) if t1 is None else symmetrize(GroupSubset.of(G, t1), True)
    if not log.check("stage2.T1_large", len(T1) > len(T0) * len(B), TOPIC,
                     witness={"T1": len(T1), "T0_times_B": len(T0) * len(B)}):
        _fail(rep, "stage 2", f"|T1| = {len(T1)} is not larger than |T0||B| = {len(T0) * len(B)}")
    T = T0 * T1
    gammas = [g for g in G.elements() if g != G.identity]
    sched = schedule_sets("lemma43", G, None, T, len(gammas), gammas=gammas, allow_truncate=True)
    if not sched.entries:
        # no translate of T avoids T: a single stage over the whole group
        whole = GroupSubset.of(G, G.elements())
        sched = Schedule("single", G, [ScheduleEntry(T, T, whole, gammas[0], None)])
    log.extend(sched.audits, "stage2.schedule.")
    S = GroupSubset.of(G, [G.identity])
    for e in sched.entries:
        S = S | e.S
    F = power(T0 | T1 | D | S, e_F) - GroupSubset.of(G, [G.identity])
    ell = len(F) + 4
    rep.F, rep.ell = F, ell
    rep.sets = {"A": A.encode(), "T0": T0.encode(), "T1": T1.encode(), "B": B.encode(),
                "D": D.encode(), "stab": stab.encode(), "classes": [G.encode(g) for g in classes],
                "schedule_mode": sched.mode, "schedule_entries": len(sched.entries)}
    log.check("stage2.ell_is_F_plus_4", ell == len(F) + 4, TOPIC, witness={"F": len(F), "ell": ell})
    # stage 3: the point set and the seeds
    rows = []
    for g in gammas:
        if g not in AT:
            rows.append(_greedy_colouring(G, F, ell, {G.identity: 0, g: 1}, 2))
    n_shift = len(classes) + 1 if shifted_orbits is None else shifted_orbits
    base = _greedy_colouring(G, F, ell, {}, 2)
    for j in range(n_shift):
        rows.append([2 + (c - 2 + j) % (ell - 2) for c in base])
    for t in range(random_orbits):
        rows.append(_greedy_colouring(G, F, ell, {}, 0,
                                      choose=lambda g, m, t=t: uniform_index(seed, t, g, m)))
    X = shift_action(G, rows, ell, close=True)
    cfg = np.asarray(X.configs)
    log.check("stage3.points_are_proper_colourings", bool(col_membership_rows(F, cfg).all()), TOPIC,
              witness={"points": X.n})
    if not log.check("stage3.action_S_free", X.is_F_free(S), TOPIC):
        _fail(rep, "stage 3", "the point set is not S-free")
    near = [d for d in AT if d != G.identity]
    J = []
    for i in (0, 1):
        m = cfg[:, G.identity] == i
        if near:
            m &= (cfg[:, near] >= 2).all(axis=1)
        J.append(sorted(np.nonzero(m)[0].tolist()))
    rep.sizes.update({"X": X.n, "J0": len(J[0]), "J1": len(J[1])})
    if not log.check("stage3.J_nonempty", bool(J[0]) and bool(J[1]), TOPIC):
        _fail(rep, "stage 3", "J0 or J1 is empty")
    a = (wit.a0, wit.a1)
    g_col: dict = {}
    clash = False
    for i in (0, 1):
        for x in J[i]:
            for al in A:
                p = X.act(al, x)
                if g_col.setdefault(p, a[i][al]) != a[i][al]:
                    clash = True
    AJ = [X.image(A, J[0]), X.image(A, J[1])]
    log.check("stage3.AJ0_AJ1_disjoint", AJ[0].isdisjoint(AJ[1]) and not clash, TOPIC)
    frakA = AJ[0] | AJ[1]
    # stage 4: K and its classes
    pool = set(range(X.n)) - X.image(B, frakA)
    sep = B * T * T.inverse() * B
    if not X.is_F_free(sep):
        _fail(rep, "stage 4", "the point set is not BTT^-1B-free")
    K = sorted(greedy_mis(schreier_graph(X, sep), (), pool))
    rep.sizes["K"] = len(K)
    if not log.check("stage4.K_large_enough", len(K) >= len(classes), TOPIC,
                     witness={"K": len(K), "classes": len(classes)}):
        _fail(rep, "stage 4", "K has fewer points than there are classes")
    Kg = {g: K[i::len(classes)] for i, g in enumerate(classes)} if classes else {}
    log.check("stage4.K_classes_nonempty", all(Kg[g] for g in classes), TOPIC)
    h_col: dict = {}
    for g, pts in Kg.items():
        b = by_gamma[g].b
        for x in pts:
            for be in B:
                p = X.act(be, x)
                if h_col.setdefault(p, b[be]) != b[be]:
                    clash = True
    frakB = set(h_col)
    log.check("stage4.h_well_defined", not clash, TOPIC)
    if not log.check("stage4.A_B_disjoint", frakA.isdisjoint(frakB), TOPIC):
        _fail(rep, "stage 4", "the seed regions overlap")
    C0 = frakA | frakB
    rep.sizes.update({"frakA": len(frakA), "frakB": len(frakB)})
    if not log.check("stage4.complement_T_syndetic", is_syndetic(X, set(range(X.n)) - C0, T), TOPIC):
        _fail(rep, "stage 4", "the uncoloured set is not T-syndetic")
    f0 = PointFunction.from_dict(X, {**g_col, **h_col}, k)
    # stage 5: extension and final checks
    try:
        fi = free_image_coloring(X, k, sched, gammas, f0=f0, seed=seed)
    except StageFailure as exc:
        _fail(rep, "stage 5", f"extension failed at {exc.stage}: {exc.detail}")
    log.extend(fi.audits, "stage5.extension.")
    f = fi.f
    images = coding_matrix(X, f)
    uniq = np.unique(images, axis=0)
    fam = [DistinguishingSet(e.S, tuple(bt), k) for e, bt in zip(sched.entries, stage_gammas(sched, gammas))]
    approx = approx_local_rule(G, k, fam, rho, D, len(fam), configs=uniq, candidates=uniq)
    log.extend(approx.audits, "stage5.approx.")
    Wl = list(rho.window)
    ft = np.array([approx.rule(tuple(int(v) for v in images[x, Wl])) for x in range(X.n)])
    ftilde = PointFunction(X, ft, rho.m)
    st = map_stabilizer(X, ftilde)
    rep.stabilizer = st.encode()
    log.check("stage5.stab_contains_rule_stab", stab <= st, TOPIC)
    target = {tuple(int(v) for v in r) for r in coding_matrix(wit.action, rho.point_function(wit.action))}
    tilde_images = coding_matrix(X, ftilde)
    log.check("stage5.images_in_target", all(tuple(int(v) for v in r) in target for r in tilde_images),
              TOPIC)
    r0, r1 = rho(tuple(wit.a0[w] for w in Wl)), rho(tuple(wit.a1[w] for w in Wl))
    log.check("stage5.J_values", all(ft[x] == r0 for x in J[0]) and all(ft[x] == r1 for x in J[1]), TOPIC)
    okH = all(ft[X.act(by_gamma[g].sigma, x)] != ft[X.act(G.mul(by_gamma[g].sigma, g), x)]
              for g, pts in Kg.items() for x in pts)
    log.check("stage5.K_values_distinguish", okH, TOPIC)
    # the two cases: γ outside AT₀²A via J, inside via K_γ
    J1s = set(J[1])
    case1 = {}
    for g in gammas:
        if g in AT:
            continue
        x = next((x for x in J[0] if X.act(g, x) in J1s), None)
        case1[str(G.encode(g))] = x
    log.check("stage5.case_outside", all(v is not None for v in case1.values()), TOPIC, witness=case1)
    case2 = {str(G.encode(g)): Kg[g][0] for g in classes}
    log.check("stage5.case_inside", all(v is not None for v in case2.values()), TOPIC, witness=case2)
    log.check("stage5.stab_equals_rule_stab", st == stab, TOPIC,
              witness={"stab": st.encode()}, counterexample={"stab": st.encode(), "expected": stab.encode()})
    return rep
