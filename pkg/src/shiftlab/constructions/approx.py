"""Extending a rule from the distinguishing intersection Z* to a larger
shift-invariant set, by copying the value of a matching point of Z*."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import caps
from ..audit import AuditLog
from ..errors import HypothesisFailure
from ..groups import FiniteGroup, GroupSubset
from ..shift import LocalRule, all_configurations, invariant_members

TOPIC = "approximate rule"


@dataclass
class ApproxReport:
    rule: LocalRule
    members: int  # |Z_{<N}| among the tested rows
    core: int  # |Z*| among the candidates
    audits: AuditLog

    def to_json(self) -> dict:
        return {"members": self.members, "core": self.core, "patterns": len(self.rule.table),
                "audits": self.audits.to_json()}


def approx_local_rule(G: FiniteGroup, k: int, Z_family: list, rho: LocalRule, D: GroupSubset,
                      N: int, configs: np.ndarray | None = None,
                      candidates: np.ndarray | None = None) -> ApproxReport:
    """Define ρ̃ on ``Z_{<N} = ⋂_{n<N} ⋂_δ δ·Z_n``.

    For each z in Z_{<N} (among ``configs``, default every configuration) a
    point z* of Z* (the full intersection, searched among ``candidates``)
    agreeing with z on ``D ∪ W ∪ WD`` is found and ``ρ̃(z) := ρ(z*)``.  The
    result is returned as a rule on W-patterns after checking that the
    existential and universal readings agree.
    """
    log = AuditLog()
    if configs is None:
        configs = all_configurations(G, k)
    caps.check(len(configs) * G.order, "approximation table")
    if candidates is None:
        candidates = configs
    W = rho.window
    Wl = list(W)
    inner = np.ones(len(configs), dtype=bool)
    for Z in Z_family[:N]:
        inner &= invariant_members(Z, configs)
    core = np.ones(len(candidates), dtype=bool)
    for Z in Z_family:
        core &= invariant_members(Z, candidates)
    zs = configs[inner]
    stars = candidates[core]
    if len(stars) == 0:
        raise HypothesisFailure("Z* is empty on this surrogate")
    match = sorted(set(D) | set(Wl) | set((W * D)), key=G.key)
    star_val = {}
    for r in stars:
        star_val.setdefault(tuple(int(v) for v in r[Wl]), set()).add(rho(tuple(int(v) for v in r[Wl])))
    log.check("well_defined_on_core", all(len(v) == 1 for v in star_val.values()), TOPIC)
    skeys = {}
    for idx, r in enumerate(stars):
        skeys.setdefault(tuple(int(v) for v in r[match]), idx)
    table = {}
    missing = None
    consistent = True
    tilde = {}
    for z in zs:
        key = tuple(int(v) for v in z[match])
        j = skeys.get(key)
        if j is None:
            missing = [int(v) for v in z]
            break
        zstar = stars[j]
        pat = tuple(int(v) for v in z[Wl])
        val = rho(tuple(int(v) for v in zstar[Wl]))
        # universal reading: every z* agreeing on W gives the same value
        if star_val.get(pat) != {val}:
            consistent = False
        if table.setdefault(pat, val) != val:
            consistent = False
        tilde[tuple(int(v) for v in z)] = (val, zstar)
    log.check("every_member_matched", missing is None, TOPIC, counterexample={"z": missing})
    if missing is not None:
        raise HypothesisFailure("some z in Z_{<N} has no matching point of Z*")
    log.check("existential_equals_universal", consistent, TOPIC)
    # (Ia) agreement on D and (Ib) ρ̃(δ·z) = ρ(δ·z*) for δ in D
    ia = ib = True
    for z, (val, zstar) in tilde.items():
        zarr = np.asarray(z)
        if any(zarr[d] != zstar[d] for d in D):
            ia = False
        for d in D:
            dz = tuple(int(v) for v in zarr[G.table[:, d]])
            dzs = zstar[G.table[:, d]]
            if dz in tilde and tilde[dz][0] != rho(tuple(int(v) for v in dzs[Wl])):
                ib = False
    log.check("Ia_agree_on_D", ia, TOPIC)
    log.check("Ib_shifted_values", ib, TOPIC)
    rule = LocalRule(W, k, rho.m, table)
    return ApproxReport(rule, int(inner.sum()), int(core.sum()), log)
