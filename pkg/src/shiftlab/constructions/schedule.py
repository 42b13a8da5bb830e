"""Increasing sequences of finite sets driving the stagewise colourings.

Two recipes are provided.  ``lemma17`` starts from ``T_0 = {1}`` and pads
each ``R_n`` with enough extra elements ``Q_n``; ``lemma43`` starts from a
given T and doubles ``T_n`` by a translate ``T_n δ_n`` disjoint from it.
All choices are first-fit in canonical group order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..audit import AuditLog
from ..errors import DomainError, StageFailure
from ..groups import (Group, GroupSubset, enumerate_nonidentity, first_elements, power,
                      symmetrize)


@dataclass
class ScheduleEntry:
    T: GroupSubset
    R: GroupSubset
    S: GroupSubset
    gamma: object
    extra: object  # Q_n (lemma17) or δ_n (lemma43)

    def to_json(self) -> dict:
        G = self.T.group
        ex = self.extra.encode() if isinstance(self.extra, GroupSubset) else G.encode(self.extra)
        return {"T": self.T.encode(), "R": self.R.encode(), "S": self.S.encode(),
                "gamma": G.encode(self.gamma), "extra": ex}


@dataclass
class Schedule:
    mode: str
    group: Group
    entries: list
    truncated_at: int | None = None
    audits: AuditLog = field(default_factory=AuditLog)

    def to_json(self) -> dict:
        return {"mode": self.mode, "entries": [e.to_json() for e in self.entries],
                "truncated_at": self.truncated_at, "audits": self.audits.to_json()}


def _one(G, g) -> GroupSubset:
    return GroupSubset.of(G, [g])


def lemma41_S(W: GroupSubset, D: GroupSubset, R: GroupSubset, M: GroupSubset,
              gamma, e_S: int = 3) -> GroupSubset:
    """``(N ∪ {γ, γ^-1})^{e_S}`` with ``N = WDRM ∪ MRDW``."""
    G = D.group
    N = (W * D * R * M) | (M * R * D * W)
    return power(N | GroupSubset.of(G, [gamma, G.inv(gamma)]), e_S)


def schedule_sets(mode: str, G: Group, D: GroupSubset | None, T: GroupSubset | None,
                  count: int, gammas: list | None = None, W: GroupSubset | None = None,
                  M: GroupSubset | None = None, e_S: int = 3,
                  allow_truncate: bool = False) -> Schedule:
    """Build ``count`` entries of the chosen recipe.

    ``gammas`` defaults to the first ``count`` non-identity elements.  When a
    disjointness requirement cannot be met in a finite group, a
    :class:`StageFailure` naming the entry is raised, or with
    ``allow_truncate`` the schedule stops there and records ``truncated_at``.
    """
    if mode not in ("lemma17", "lemma43"):
        raise DomainError(f"unknown schedule mode {mode!r}")
    one = _one(G, G.identity)
    M = one if M is None else symmetrize(M, True)
    if gammas is None:
        gammas = enumerate_nonidentity(G, count)
    if len(gammas) < count:
        raise DomainError("fewer γ's than schedule entries")
    log = AuditLog()
    entries = []
    if mode == "lemma17":
        if D is None:
            raise DomainError("lemma17 schedules need D")
        W = one if W is None else W
        Tn = one
    else:
        if T is None:
            raise DomainError("lemma43 schedules need T")
        Tn = T
    truncated = None
    for n in range(count):
        gamma = gammas[n]
        if mode == "lemma17":
            need = len(Tn) * len(D) ** 2 + 1
            if G.is_finite and need > G.order:
                truncated = n
                if not allow_truncate:
                    raise StageFailure(f"schedule entry {n}",
                                       f"|Q_n| = {need} exceeds the group order {G.order}")
                break
            Qn = GroupSubset.of(G, first_elements(G, need))
            Rn = Tn * Qn
            Rs = symmetrize(Rn, True)
            S_need = D * D * Rn * Rn.inverse() * D * D
            Sn = symmetrize(S_need | lemma41_S(W, D, Rs, M, gamma, e_S), True)
            extra = Qn
            log.check(f"entry{n}.Q_large", len(Qn) > len(Tn) * len(D) ** 2, "lemma17 schedule")
            log.check(f"entry{n}.R_is_TQ", Rn == Tn * Qn, "lemma17 schedule")
            log.check(f"entry{n}.S_contains_DDRRDD", S_need <= Sn, "lemma17 schedule")
        else:
            delta = None
            for g in G.elements():
                if Tn.isdisjoint(Tn.right(g)):
                    delta = g
                    break
            if delta is None:
                truncated = n
                if not allow_truncate:
                    raise StageFailure(f"schedule entry {n}",
                                       "no δ with T_n ∩ T_n δ = ∅ exists in this finite group")
                break
            Rn = Tn | Tn.right(delta)
            Sn = symmetrize((Rn * Rn.inverse())
                            | power((Rn * M) | (M * Rn) | GroupSubset.of(G, [gamma, G.inv(gamma)]), e_S),
                            True)
            extra = delta
            log.check(f"entry{n}.translate_disjoint", Tn.isdisjoint(Tn.right(delta)), "lemma43 schedule")
            log.check(f"entry{n}.R_is_union", Rn == (Tn | Tn.right(delta)), "lemma43 schedule")
            log.check(f"entry{n}.S_contains_RR", (Rn * Rn.inverse()) <= Sn, "lemma43 schedule")
        log.check(f"entry{n}.S_symmetric_with_identity",
                  Sn.inverse() == Sn and G.identity in Sn, "schedule")
        log.check(f"entry{n}.gamma_in_S", gamma in Sn, "schedule")
        entries.append(ScheduleEntry(Tn, Rn, Sn, gamma, extra))
        Tn = Sn * Tn
    for n in range(len(entries) - 1):
        log.check(f"entry{n}.T_next_is_ST", entries[n + 1].T == entries[n].S * entries[n].T, "schedule")
    return Schedule(mode, G, entries, truncated, log)
