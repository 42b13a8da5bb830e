"""Points and finite windows certifying that a rule is not constant and not
periodic, found by exhaustive search over the free part."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..actions import FiniteAction
from ..audit import AuditLog
from ..errors import HypothesisFailure
from ..groups import FiniteGroup, GroupSubset, first_elements, symmetrize
from ..shift import LocalRule, coding_matrix, free_part_action, map_stabilizer

TOPIC = "witnesses"


@dataclass
class DistinguishingWitness:
    gamma: int
    sigma: int
    b: tuple
    B: GroupSubset

    def to_json(self) -> dict:
        G = self.B.group
        return {"gamma": G.encode(self.gamma), "sigma": G.encode(self.sigma),
                "b": list(self.b), "B": self.B.encode()}


@dataclass
class WitnessReport:
    action: FiniteAction
    values: np.ndarray  # ρ on each free point
    a0: tuple
    a1: tuple
    A: GroupSubset
    stab: GroupSubset
    witnesses: list
    excluded: list
    audits: AuditLog

    def to_json(self) -> dict:
        G = self.A.group
        return {"a0": list(self.a0), "a1": list(self.a1), "A": self.A.encode(),
                "stab": self.stab.encode(), "witnesses": [w.to_json() for w in self.witnesses],
                "excluded": [G.encode(g) for g in self.excluded], "audits": self.audits.to_json()}


def _determines(rows, vals, point: np.ndarray, A: list) -> bool:
    mask = (rows[:, A] == point[A]).all(axis=1)
    return bool((vals[mask] == vals[mask][0]).all()) if mask.any() else True


def find_witnesses(G: FiniteGroup, k: int, rho: LocalRule, gammas=None) -> WitnessReport:
    """Exhaustive search on ``Free(k^G)`` for a₀, a₁ with different ρ, a
    symmetric determining set A, and one witness (b_γ, σ_γ, B_γ) per γ.

    γ's in the stabilizer of π_ρ admit no witness and are listed as excluded.
    """
    log = AuditLog()
    action = free_part_action(G, k)
    rows = np.asarray(action.configs)
    f = rho.point_function(action)
    vals = f.values
    if len(vals) == 0 or (vals == vals[0]).all():
        raise HypothesisFailure("ρ is constant on the free part")
    i0 = 0
    i1 = int(np.nonzero(vals != vals[0])[0][0])
    a0, a1 = rows[i0], rows[i1]
    # smallest determining set among the canonical balls and the rule's own window
    A = None
    family = [symmetrize(GroupSubset.of(G, first_elements(G, r)), True) for r in range(1, G.order + 1)]
    family.append(symmetrize(rho.window | GroupSubset.of(G, [G.identity]), True))
    for cand in sorted(family, key=len):
        Al = list(cand)
        if _determines(rows, vals, a0, Al) and _determines(rows, vals, a1, Al):
            A = cand
            break
    log.check("A_determines_rho", A is not None, TOPIC, witness={"A": A.encode() if A else None})
    stab = map_stabilizer(action, f)
    if gammas is None:
        gammas = [g for g in G.elements() if g != G.identity]
    M = coding_matrix(action, f)  # M[x, σ] = ρ(σ·x)
    Wr = list(rho.window)
    out, excluded = [], []
    for g in gammas:
        if g in stab:
            excluded.append(g)
            continue
        Mg = M[:, G.table[:, g]]  # column σ holds ρ(σγ·x)
        diff = M != Mg
        x = int(np.nonzero(diff.any(axis=1))[0][0])
        s = int(np.nonzero(diff[x])[0][0])
        sg = G.mul(s, g)
        B = symmetrize(GroupSubset.of(G, [G.identity, s, sg] + [G.mul(w, s) for w in Wr]
                                      + [G.mul(w, sg) for w in Wr]), True)
        b = rows[x]
        Bl = list(B)
        agree = (rows[:, Bl] == b[Bl]).all(axis=1)
        ok = bool((M[agree, s] != M[agree, sg]).all())
        log.check(f"witness_{G.encode(g)}", ok and {G.identity, s, sg} <= set(Bl) and B.inverse() == B,
                  TOPIC, witness={"sigma": G.encode(s), "B": B.encode(), "checked": int(agree.sum())})
        out.append(DistinguishingWitness(g, s, tuple(int(v) for v in b), B))
    return WitnessReport(action, vals, tuple(int(v) for v in a0), tuple(int(v) for v in a1),
                         A, stab, out, excluded, log)
