"""Stagewise colouring whose coding images avoid a list of periods.

Stage n colours a block C_n of still-uncoloured points so that for every
point x and every γ handled at that stage some σ in S_n sees different
colours at σ·x and σγ·x.  Blocks come from splitting the uncoloured set
with :func:`split_syndetic_plain`; the final stage takes everything left.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..actions import FiniteAction, PointFunction, UNDEFINED
from ..audit import AuditLog
from ..csp import CSP, UNSAT, PredicateConstraint, backtracking
from ..errors import CapExceeded, HypothesisFailure, StageFailure
from ..graphs import is_syndetic, split_syndetic_plain
from ..lll import moser_tardos
from .schedule import Schedule

DEFAULT_NODE_CAP = 200_000


@dataclass
class FreeImageResult:
    f: PointFunction
    certificate: list  # (x, γ, σ, stage)
    stages: list
    audits: AuditLog = field(default_factory=AuditLog)

    def to_json(self) -> dict:
        G = self.f.action.group
        return {"coloring": self.f.tolist(),
                "certificate": [[x, G.encode(g), G.encode(s), n] for x, g, s, n in self.certificate],
                "stages": self.stages, "audits": self.audits.to_json()}


def _stage_constraint(pairs, pos, fvals):
    """Constraint 'some pair gets two different colours'.

    ``pairs`` hold points; a point is either already coloured (fvals) or a
    variable of this stage (pos gives its place in the domain).
    """

    def value(p, vals):
        i = pos.get(p)
        return fvals[p] if i is None else vals[i]

    def violates(vals):
        return all(value(a, vals) == value(b, vals) for a, b in pairs)

    def partial(assign):
        open_ = False
        for a, b in pairs:
            va = fvals[a] if a not in pos else assign.get(a)
            vb = fvals[b] if b not in pos else assign.get(b)
            if va is None or vb is None:
                open_ = True
            elif va != vb:
                return False
        return None if open_ else True

    return violates, partial


def stage_gammas(schedule: Schedule, gammas: list) -> list[list]:
    """γ's handled by each stage: one per entry, the rest batched into the last."""
    entries = schedule.entries
    if not entries:
        raise HypothesisFailure("schedule has no entries")
    out = [[e.gamma] for e in entries[:-1]]
    used = {g for batch in out for g in batch}
    out.append([g for g in gammas if g not in used])
    return out


def free_image_coloring(action: FiniteAction, k: int, schedule: Schedule, gammas: list | None = None,
                        f0: PointFunction | None = None, seed: int = 0,
                        node_cap: int = DEFAULT_NODE_CAP) -> FreeImageResult:
    """Colour every point with ``k`` colours so that, for each listed γ, the
    coding image of every point is not γ-periodic; see the module docstring.

    Raises :class:`StageFailure` naming the stage when a split hypothesis
    fails or a stage CSP is unsatisfiable.
    """
    G = action.group
    if not action.is_free():
        raise HypothesisFailure("action is not free")
    if gammas is None:
        gammas = [g for g in G.elements() if g != G.identity]
    if G.identity in gammas:
        raise HypothesisFailure("the identity cannot be distinguished from itself")
    if k < 2:
        raise StageFailure("stage 0", "a single colour cannot distinguish any pair of points")
    batches = stage_gammas(schedule, gammas)
    f = PointFunction.empty(action, k) if f0 is None else f0.copy()
    if f.k != k:
        raise HypothesisFailure("seed colouring uses a different palette")
    log = AuditLog()
    U = set(range(action.n)) - f.domain
    T0 = schedule.entries[0].T
    if not log.check("uncoloured_T0_syndetic", is_syndetic(action, U, T0), "stagewise colouring"):
        raise StageFailure("stage 0", "the uncoloured set is not T_0-syndetic")
    certificate = []
    stages = []
    last = len(schedule.entries) - 1
    for n, entry in enumerate(schedule.entries):
        batch = batches[n]
        if n < last:
            try:
                sp = split_syndetic_plain(action, U, entry.R, entry.S, entry.T,
                                          schedule.entries[n + 1].T)
            except HypothesisFailure as exc:
                raise StageFailure(f"stage {n}", f"split failed: {exc}") from exc
            C, U_next = sp.C, sp.U
            for key, ok in sp.checks.items():
                log.check(f"stage{n}.split.{key}", ok, "syndetic splitting")
        else:
            C, U_next = set(U), set()
        if not batch:
            U = U_next
            stages.append({"stage": n, "block": len(C), "gammas": [], "solver": "none"})
            continue
        fvals = f.values.tolist()
        variables = sorted(C)
        live = set(C) | f.domain
        S = list(entry.S)
        cons = []
        seen = set()
        for x in range(action.n):
            for g in batch:
                gx = action.act(g, x)
                pairs = []
                done = False
                for s in S:
                    a, b = action.act(s, x), action.act(s, gx)
                    if a not in live or b not in live:
                        continue
                    if a not in C and b not in C:
                        if fvals[a] != fvals[b]:
                            done = True
                            break
                        continue
                    pairs.append((a, b))
                if done:
                    continue
                if not pairs:
                    raise StageFailure(f"stage {n}",
                                       f"point {x} and γ={G.encode(g)} cannot be distinguished")
                key = tuple(sorted(pairs))
                if key in seen:
                    continue
                seen.add(key)
                dom = tuple(sorted({p for ab in pairs for p in ab if p in C}))
                pos = {p: i for i, p in enumerate(dom)}
                v, part = _stage_constraint(pairs, pos, fvals)
                cons.append(PredicateConstraint(dom, v, part, label=(x, g)))
        csp = CSP(variables, k, cons)
        solver = "backtracking"
        try:
            sol = backtracking(csp, node_cap)
        except CapExceeded:
            solver = "moser_tardos"
            rep = moser_tardos(csp, seed + n)
            if rep.status != "solved":
                raise StageFailure(f"stage {n}", "resampling budget exhausted")
            sol = rep.assignment
        if sol == UNSAT:
            raise StageFailure(f"stage {n}", "stage constraints are unsatisfiable")
        for p, c in sol.items():
            f.values[p] = c
        fv = f.values
        for x in range(action.n):
            for g in batch:
                gx = action.act(g, x)
                for s in S:
                    a, b = action.act(s, x), action.act(s, gx)
                    if fv[a] != UNDEFINED and fv[b] != UNDEFINED and fv[a] != fv[b]:
                        certificate.append((x, g, s, n))
                        break
                else:
                    raise AssertionError(f"stage {n} solution leaves ({x}, {g}) undistinguished")
        stages.append({"stage": n, "block": len(C), "gammas": [G.encode(g) for g in batch],
                       "constraints": len(cons), "solver": solver})
        U = U_next
    leftover = np.nonzero(f.values == UNDEFINED)[0]
    f.values[leftover] = 0
    log.check("total", f.is_total, "stagewise colouring")
    if f0 is not None:
        log.check("extends_seed", f.extends(f0), "stagewise colouring")
    ok, bad = replay_certificate(action, f, schedule, certificate)
    log.check("certificate_replay", ok, "stagewise colouring", witness={"entries": len(certificate)},
              counterexample=bad)
    covered = {(x, g) for x, g, _, _ in certificate}
    log.check("certificate_complete", len(covered) == action.n * len(gammas), "stagewise colouring")
    if len(gammas) == G.order - 1:
        stabs = image_stabilizer_sizes(action, f)
        bad = np.nonzero(stabs != 1)[0]
        log.check("images_aperiodic", len(bad) == 0, "stagewise colouring",
                  witness={"points": action.n},
                  counterexample={"point": int(bad[0])} if len(bad) else None)
    return FreeImageResult(f, certificate, stages, log)


def replay_certificate(action: FiniteAction, f: PointFunction, schedule: Schedule, certificate):
    """Check that each recorded σ lies in its S_n and separates σ·x from σγ·x."""
    for x, g, s, n in certificate:
        a, b = action.act(s, x), action.act(s, action.act(g, x))
        if s not in schedule.entries[n].S or f[a] == f[b] or f[a] == UNDEFINED:
            return False, {"x": x, "gamma": action.group.encode(g), "sigma": action.group.encode(s)}
    return True, None


def image_stabilizer_sizes(action: FiniteAction, f: PointFunction) -> np.ndarray:
    """|Stab(π_f(x))| for every point x, by direct comparison of shifted rows."""
    G = action.group
    M = f.values[action.table].T  # row x: γ ↦ f(γ·x)
    sizes = np.zeros(action.n, dtype=np.int64)
    for g in range(G.order):
        sizes += (M[:, G.table[:, g]] == M).all(axis=1)
    return sizes
