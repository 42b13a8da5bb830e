"""The normal-subgroup realisation and the trivial-stabilizer colouring."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..actions import FiniteAction, PointFunction
from ..audit import AuditLog
from ..errors import DomainError, HypothesisFailure
from ..graphs import extend_proper_coloring, schreier_graph
from ..groups import FiniteGroup, GroupSubset, is_normal, is_subgroup
from ..shift import (coding_matrix, free_part_action, map_stabilizer, prop15_rule,
                     sft_col, sft_membership_rows, sft_xh)


@dataclass
class Prop15Report:
    H: GroupSubset
    stabilizer: GroupSubset
    audits: AuditLog

    def to_json(self) -> dict:
        return {"H": self.H.encode(), "stabilizer": self.stabilizer.encode(),
                "audits": self.audits.to_json()}


def verify_prop15(G: FiniteGroup, H: GroupSubset, k: int) -> Prop15Report:
    """Realise a normal subgroup H as the stabilizer of an equivariant map
    ``Free(k^G) → X_H`` and check the result exhaustively."""
    if k < 2:
        raise DomainError("need k >= 2")
    if not is_subgroup(H):
        raise DomainError("H is not a subgroup")
    if not is_normal(H):
        raise DomainError("H is not normal")
    log = AuditLog()
    action = free_part_action(G, k)
    rule = prop15_rule(H, k)
    f = rule.point_function(action)
    images = coding_matrix(action, f)
    inside = sft_membership_rows(sft_xh(H, 2), images)
    bad = np.nonzero(~inside)[0]
    log.check("image_in_X_H", bool(inside.all()), "normal subgroup realisation",
              witness={"points": action.n},
              counterexample=None if inside.all() else {"point": list(action.labels[bad[0]])})
    stab = map_stabilizer(action, f)
    log.check("stabilizer_equals_H", stab == H, "normal subgroup realisation",
              witness={"stabilizer": stab.encode()},
              counterexample={"stabilizer": stab.encode(), "H": H.encode()})
    # every γ outside H moves some image: exhibit one point per γ
    moved = {}
    for g in G.elements():
        if g in H:
            continue
        diff = np.nonzero((images[:, G.table[:, g]] != images).any(axis=1))[0]
        moved[str(G.encode(g))] = list(action.labels[diff[0]]) if len(diff) else None
    log.check("outside_H_moves_some_image", all(v is not None for v in moved.values()),
              "normal subgroup realisation", witness=moved)
    return Prop15Report(H, stab, log)


@dataclass
class TrivialStabReport:
    action: FiniteAction
    f: PointFunction
    stabilizer: GroupSubset
    audits: AuditLog

    def to_json(self) -> dict:
        return {"points": self.action.n, "stabilizer": self.stabilizer.encode(),
                "coloring": self.f.tolist(), "audits": self.audits.to_json()}


def trivial_stab_coloring(G: FiniteGroup, F: GroupSubset, ell: int) -> TrivialStabReport:
    """A proper ℓ-colouring of G(Free(3^G), F) whose coding map has trivial
    stabilizer.

    Seeds: ``J_i = {x : x(1) = i, x(σ) = 2 for σ in F}`` gets colour i for
    i = 0, 1; the seed is then extended greedily.
    """
    if ell < len(F) + 1:
        raise HypothesisFailure(f"need ell >= |F| + 1 = {len(F) + 1}")
    if ell < 2:
        raise HypothesisFailure("need at least two colours")
    log = AuditLog()
    action = free_part_action(G, 3)
    if action.n == 0:
        raise HypothesisFailure("Free(3^G) is empty")
    graph = schreier_graph(action, F)
    rows = np.asarray(action.labels)
    Fl = list(F)
    J = []
    for i in (0, 1):
        m = rows[:, G.identity] == i
        if Fl:
            m &= (rows[:, Fl] == 2).all(axis=1)
        J.append(set(np.nonzero(m)[0].tolist()))
    if not J[0] or not J[1]:
        raise HypothesisFailure("J_0 or J_1 is empty; surrogate too small")
    log.check("J_nonempty", True, "trivial stabilizer colouring",
              witness={"J0": len(J[0]), "J1": len(J[1])})
    log.check("J_independent", graph.is_independent(J[0]) and graph.is_independent(J[1]),
              "trivial stabilizer colouring")
    log.check("J_disjoint", J[0].isdisjoint(J[1]), "trivial stabilizer colouring")
    g = {x: i for i in (0, 1) for x in J[i]}
    out = extend_proper_coloring(graph, g, ell)
    f = PointFunction(action, [out[x] for x in range(action.n)], ell)
    log.check("extends_seed", all(out[x] == c for x, c in g.items()), "trivial stabilizer colouring")
    # properness checked twice: on the graph, and as Col(F, ℓ) membership of images
    log.check("proper_on_graph", graph.is_proper(out), "trivial stabilizer colouring")
    if Fl:
        images = coding_matrix(action, f)
        ok = sft_membership_rows(sft_col(F, ell), images)
        log.check("images_in_Col", bool(ok.all()), "trivial stabilizer colouring")
    stab = map_stabilizer(action, f)
    log.check("stabilizer_trivial", len(stab) == 1, "trivial stabilizer colouring",
              witness={"stabilizer": stab.encode()}, counterexample={"stabilizer": stab.encode()})
    return TrivialStabReport(action, f, stab, log)
