"""Distinguishing one group element by a proper colouring, via a local-lemma CSP.

Given a local rule τ on proper colourings (window W) and an element γ that
does not stabilise the induced map, a partial proper colouring f₀ on C₀ is
extended to C₀ ⊔ C so that for every point x some σ in S gives
``ρ_f(σ·x) ≠* ρ_f(σγ·x)``.  Points of a maximal N⁴-separated set Z carry
the random choices; each constraint ``B(z, β)`` asks for a witness ν in DRM.

All finite set algebra is recomputed and every containment the argument
relies on is re-checked, so the audits describe the instance actually built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..actions import FiniteAction, PointFunction, translation_action
from ..audit import AuditLog
from ..csp import (CSP, UNSAT, PredicateConstraint, backtracking, compute_params,
                   constraint_probability, list_reduction)
from ..errors import DomainError, HypothesisFailure
from ..graphs import (extend_proper_coloring, greedy_mis, is_sd_syndetic,
                      is_separated, proper_extensions, schreier_graph, sd_separated)
from ..groups import (Group, GroupSubset, cyclic, dihedral, direct_product,
                      power, symmetrize)
from ..lll import moser_tardos, uniform_index
from ..shift import LocalRule
from .bounds import vdeg_bound

TOPIC = "distinguishing colouring"


# --- the subgroup H and its core ---------------------------------------------


def _cayley_neighbours(F: GroupSubset, allowed: set):
    G = F.group

    def nb(p):
        return [G.mul(s, p) for s in F if G.mul(s, p) in allowed]
    return nb


def compute_H(F: GroupSubset, ell: int, W: GroupSubset, tau: LocalRule,
              candidates=None, witnesses: dict | None = None) -> GroupSubset:
    """Elements h with ``τ(x↾W) = τ((h·x)↾W)`` for every proper colouring x.

    Any proper colouring of the finite set ``W ∪ Wh`` extends to a proper
    colouring of the whole Cayley graph when ``ℓ > |F|``, so it suffices to
    test colourings of that set.  ``witnesses`` (if given) receives, for each
    rejected h, a colouring on which τ changes.
    """
    G = W.group
    if ell <= len(F):
        raise DomainError(f"need ell >= |F| + 1 = {len(F) + 1}")
    if candidates is None:
        candidates = (W * W) | (W * F * W)
    Wl = list(W)
    keep = []
    for h in candidates:
        pts = sorted(set(Wl) | {G.mul(w, h) for w in Wl}, key=G.key)
        idx = {p: i for i, p in enumerate(pts)}
        nb = _cayley_neighbours(F, set(pts))
        inside = True
        for col in proper_extensions(pts, nb, ell):
            p1 = tuple(col[idx[w]] for w in Wl)
            p2 = tuple(col[idx[G.mul(w, h)]] for w in Wl)
            if tau(p1) != tau(p2):
                inside = False
                if witnesses is not None:
                    witnesses[h] = {"pattern": p1, "shifted": p2}
                break
        if inside:
            keep.append(h)
    return GroupSubset.of(G, keep)


def rule_stab(H: GroupSubset, mode: str = "exact", scope=None) -> tuple[GroupSubset, str]:
    """Elements all of whose conjugates lie in H.

    ``exact`` conjugates by the whole (finite) group.  ``bounded`` conjugates
    only by ``scope`` and so returns an upper bound, labelled as such.
    """
    G = H.group
    if mode == "exact":
        if not G.is_finite:
            raise DomainError("exact mode needs a finite group")
        conj = list(G.elements())
        label = "exact"
    elif mode == "bounded":
        if scope is None:
            raise DomainError("bounded mode needs a conjugator scope")
        conj = list(scope)
        label = "upper_bound"
    else:
        raise DomainError(f"unknown mode {mode!r}")
    return GroupSubset.of(G, [h for h in H if all(G.conj(g, h) in H for g in conj)]), label


def q_map(H: GroupSubset, stab: GroupSubset, scope=None) -> tuple[dict, GroupSubset]:
    """First conjugator (canonical order) pushing each h in H∖stab out of H."""
    G = H.group
    conj = G.elements() if scope is None else scope
    conj = list(conj) if scope is not None or G.is_finite else None
    q = {}
    for h in H:
        if h in stab:
            continue
        it = conj if conj is not None else G.elements()
        for g in it:
            if G.conj(g, h) not in H:
                q[h] = g
                break
        else:
            raise HypothesisFailure(f"no conjugator moves {G.encode(h)} out of H within scope")
    return q, GroupSubset.of(G, list(q.values()) + [G.identity])


# --- derived sets -------------------------------------------------------------


@dataclass
class Lemma41Data:
    group: Group
    F: GroupSubset
    ell: int
    W: GroupSubset
    tau: LocalRule
    H: GroupSubset
    stab: GroupSubset
    q: dict
    Q: GroupSubset
    D: GroupSubset
    R: GroupSubset
    M: GroupSubset
    gamma: object
    N: GroupSubset
    S: GroupSubset
    e_D: int = 2
    e_S: int = 3
    audits: AuditLog = field(default_factory=AuditLog)

    @property
    def e_V(self) -> int:
        return self.e_D - 1

    @property
    def DRM(self) -> GroupSubset:
        return self.D * self.R * self.M

    def to_json(self) -> dict:
        G = self.group
        return {"F": self.F.encode(), "ell": self.ell, "W": self.W.encode(), "H": self.H.encode(),
                "stab": self.stab.encode(),
                "q": [[G.encode(h), G.encode(g)] for h, g in self.q.items()],
                "Q": self.Q.encode(), "D": self.D.encode(), "R": self.R.encode(), "M": self.M.encode(),
                "gamma": G.encode(self.gamma), "N": self.N.encode(), "S_size": len(self.S),
                "e_D": self.e_D, "e_S": self.e_S}


def lemma41_sets(F: GroupSubset, ell: int, W: GroupSubset, tau: LocalRule, R: GroupSubset,
                 M: GroupSubset, gamma, e_D: int = 2, e_S: int = 3) -> Lemma41Data:
    """Compute H, its core, Q, D, N and S and assert the containments used later."""
    G = W.group
    one = GroupSubset.of(G, [G.identity])
    if G.identity in F or F.inverse() != F:
        raise DomainError("F must be symmetric and avoid the identity")
    if G.identity not in W or W.inverse() != W:
        raise DomainError("W must be symmetric and contain the identity")
    if e_D < 2:
        raise DomainError("e_D must be at least 2")
    log = AuditLog()
    R = symmetrize(R, True)
    M = symmetrize(M, True)
    cand = None
    if G.is_finite:
        cand = list(G.elements())  # test everything, then compare with the a-priori bound
    H = compute_H(F, ell, W, tau, cand)
    bound = (W * W) | (W * F * W)
    log.check("H_within_WW_WFW", H <= bound, TOPIC, witness={"H": H.encode()},
              counterexample={"outside": (H - bound).encode()})
    log.check("identity_in_H", G.identity in H, TOPIC)
    stab, label = rule_stab(H, "exact" if G.is_finite else "bounded",
                            None if G.is_finite else power(symmetrize(W | F, True), 4))
    if gamma in stab:
        raise HypothesisFailure(f"γ = {G.encode(gamma)} stabilises the induced map")
    log.check("gamma_not_in_stab", True, TOPIC, witness={"stab": stab.encode(), "label": label})
    q, Q = q_map(H, stab)
    log.check("q_moves_out_of_H", all(G.conj(g, h) not in H for h, g in q.items()), TOPIC)
    base = F | W | Q | Q.inverse()
    D = power(base, e_D)
    N = (W * D * R * M) | (M * R * D * W)
    S = power(N | GroupSubset.of(G, [gamma, G.inv(gamma)]), e_S)
    log.check("D_contains_generators", base <= D and W <= D, TOPIC)
    FW = F | W
    log.check("FW_power_Q_in_D", power(FW | one, e_D - 1) * Q <= D, TOPIC)
    log.check("N_symmetric_with_identity", N.inverse() == N and G.identity in N, TOPIC)
    log.check("S_contains_N_and_gamma", N <= S and gamma in S and G.inv(gamma) in S, TOPIC)
    return Lemma41Data(G, F, ell, W, tau, H, stab, q, Q, D, R, M, gamma, N, S, e_D, e_S, log)


# --- partitions and the CSP ---------------------------------------------------


@dataclass
class Partition:
    C0: set
    C: set
    U: set
    f0: PointFunction
    U_prime: list = field(default_factory=list)


def build_partition(action: FiniteAction, data: Lemma41Data, centers, u_centers=()) -> Partition:
    """``C = D·centers``, ``U = D·u_centers``, ``C₀`` the rest, f₀ a greedy
    proper colouring of C₀."""
    C = action.image(data.D, centers)
    U = action.image(data.D, u_centers)
    if not C.isdisjoint(U):
        raise DomainError("C and U overlap")
    C0 = set(range(action.n)) - C - U
    graph = schreier_graph(action, data.F)
    col = extend_proper_coloring(graph.induced(C0), {}, data.ell)
    f0 = PointFunction.from_dict(action, col, data.ell)
    return Partition(C0, C, U, f0, sorted(u_centers))


@dataclass
class Lemma41Result:
    data: Lemma41Data
    action: FiniteAction
    partition: Partition
    C_prime: set
    Z: list
    g: dict
    regions: dict  # z -> tuple of points N_z·z
    cols: dict  # z -> list of colourings of the region
    csp: CSP
    keys: list  # constraint index -> (z, β, c)
    deltas: list
    params: object = None
    solution: dict | None = None
    f: dict | None = None
    solver: dict = field(default_factory=dict)
    audits: AuditLog = field(default_factory=AuditLog)

    def to_json(self) -> dict:
        G = self.data.group
        return {"data": self.data.to_json(), "C0": len(self.partition.C0), "C": len(self.partition.C),
                "U": len(self.partition.U), "C_prime": sorted(self.C_prime), "Z": self.Z,
                "col_sizes": {str(z): len(v) for z, v in self.cols.items()},
                "constraints": [{"z": z, "beta": G.encode(b), "conjugate": G.encode(c), "domain": list(d)}
                                for (z, b, c), d in zip(self.keys, self.deltas)],
                "params": None if self.params is None else self.params.to_json(),
                "solver": self.solver, "audits": self.audits.to_json()}


def rho_f(action: FiniteAction, data: Lemma41Data, value, x: int):
    """τ of the W-pattern around x, or None when some point is uncoloured."""
    pat = []
    for w in data.W:
        v = value(action.act(w, x))
        if v is None:
            return None
        pat.append(v)
    return data.tau(tuple(pat))


def distinguishes(a, b) -> bool:
    """The three-valued ``≠*``: both defined and different."""
    return a is not None and b is not None and a != b


def lemma41_csp(action: FiniteAction, data: Lemma41Data, part: Partition) -> Lemma41Result:
    """Build Z, the base colouring g, the lists Col(z) and constraints B(z, β)."""
    G = data.group
    log = AuditLog()
    n = action.n
    C0, C, U = part.C0, part.C, part.U
    if not (C0.isdisjoint(C) and C0.isdisjoint(U) and C.isdisjoint(U) and len(C0 | C | U) == n):
        raise HypothesisFailure("C0, C, U do not partition the points")
    if not log.check("C_RD_syndetic", is_sd_syndetic(action, C, data.R, data.D), TOPIC):
        raise HypothesisFailure("C is not (R, D)-syndetic")
    wit = sd_separated(action, U, data.S, data.D, hint=part.U_prime)
    if not log.check("U_SD_separated", wit is not None, TOPIC, witness={"U_prime": wit}):
        raise HypothesisFailure("U is not (S, D)-separated")
    if not log.check("action_S_free", action.is_F_free(data.S), TOPIC):
        raise HypothesisFailure("action is not S-free")
    graph = schreier_graph(action, data.F)
    f0 = {x: part.f0[x] for x in part.f0.domain}
    if set(f0) != C0 or not graph.is_proper(f0):
        raise HypothesisFailure("f0 must be a proper colouring of exactly C0")
    Cp = action.core(data.D, C)
    N4 = power(data.N, 4)
    Z = sorted(greedy_mis(schreier_graph(action, N4), (), Cp))
    log.check("Z_N4_separated", is_separated(action, Z, N4), TOPIC, witness={"Z": Z})
    log.check("Z_maximal", Cp <= action.image(N4, Z), TOPIC)
    NZ = action.image(data.N, Z)
    base = C0 | (C - NZ)
    gcol = extend_proper_coloring(graph.induced(base), f0, data.ell)
    log.check("g_proper_extends_f0", graph.is_proper(gcol) and all(gcol[x] == c for x, c in f0.items()),
              TOPIC)
    # lists Col(z): proper colourings of C ∩ N·z compatible with g
    regions, cols = {}, {}
    N_list = list(data.N)
    for z in Z:
        pts = [action.act(v, z) for v in N_list if action.act(v, z) in C]
        if len(set(pts)) != len(pts):
            raise HypothesisFailure("ν ↦ ν·z is not injective on N")
        regions[z] = tuple(pts)
        cols[z] = list(proper_extensions(pts, lambda p: graph.adj[p], data.ell, gcol))
        if not cols[z]:
            raise AssertionError(f"empty colour list at z={z}")
    owner = {p: (z, i) for z, pts in regions.items() for i, p in enumerate(pts)}
    log.check("regions_disjoint", len(owner) == sum(len(p) for p in regions.values()), TOPIC)
    log.check("lists_nonempty", all(cols[z] for z in Z), TOPIC,
              witness={str(z): len(cols[z]) for z in Z})
    # constraints, one per (z, βγβ^-1); equal conjugates give equal constraints
    DRM = list(data.DRM)
    N5 = power(data.N, 5)
    cons, keys, deltas = [], [], []
    Nsets = {z: action.image(data.N, [z]) for z in Z}
    for z in Z:
        seen = set()
        for beta in N5:
            c = G.conj(beta, data.gamma)
            if c in seen:
                continue
            seen.add(c)
            cz = action.act(c, z)
            near = action.image(data.N, [z]) | action.image(data.N, [cz])
            dom = tuple(zz for zz in Z if not Nsets[zz].isdisjoint(near))
            pairs = [(action.act(v, z), action.act(v, cz)) for v in DRM]
            cons.append(_make_constraint(action, data, dom, pairs, gcol, owner, (z, beta)))
            keys.append((z, beta, c))
            deltas.append(dom)
    csp = CSP(Z, {z: cols[z] for z in Z}, cons)
    res = Lemma41Result(data, action, part, Cp, Z, gcol, regions, cols, csp, keys, deltas)
    maxd = max((len(d) for d in deltas), default=0)
    log.check("delta_at_most_2", maxd <= 2, TOPIC, witness={"max_delta": maxd})
    params = compute_params(csp)
    res.params = params
    log.check("order_at_most_2", params.ord <= 2, TOPIC, witness=params.to_json())
    vb = vdeg_bound(len(data.D), len(data.R), len(data.M))
    log.check("vdeg_within_bound", params.vdeg <= vb, TOPIC,
              witness={"vdeg": params.vdeg, "bound": vb})
    res.audits = log
    return res


def _make_constraint(action, data, dom, pairs, gcol, owner, label):
    pos = {z: j for j, z in enumerate(dom)}

    def value_fn(vals):
        def value(p):
            if p in gcol:
                return gcol[p]
            o = owner.get(p)
            if o is None or o[0] not in pos:
                return None
            return vals[pos[o[0]]][o[1]]
        return value

    def violates(vals):
        value = value_fn(vals)
        return not any(distinguishes(rho_f(action, data, value, a), rho_f(action, data, value, b))
                       for a, b in pairs)

    return PredicateConstraint(dom, violates, None, label=label)


def assemble(res: Lemma41Result, solution: dict) -> dict:
    f = dict(res.g)
    for z, phi in solution.items():
        for p, c in zip(res.regions[z], phi):
            f[p] = c
    return f


def solve(res: Lemma41Result, seed: int = 0, max_resamples: int = 100_000) -> dict:
    """Solve through the uniform-alphabet encoding and resampling; fall back
    to exact search if the resampling budget runs out."""
    red = list_reduction(res.csp)
    rep = moser_tardos(red.csp, seed, max_resamples)
    res.solver = {"method": "list_reduction+moser_tardos", "seed": seed, "resamples": rep.resamples,
                  "status": rep.status, "alphabet_digits": len(str(red.n))}
    if rep.status == "solved":
        sol = red.decode(rep.assignment)
    else:
        sol = backtracking(res.csp)
        res.solver["fallback"] = "backtracking"
        if sol == UNSAT:
            res.audits.check("csp_satisfiable", False, TOPIC)
            return {}
    res.solution = sol
    res.f = assemble(res, sol)
    verify_solution(res)
    return res.f


def verify_solution(res: Lemma41Result) -> None:
    """Rescans that use only f, independently of the CSP encoding."""
    data, action, log = res.data, res.action, res.audits
    G = data.group
    f = res.f
    graph = schreier_graph(action, data.F)
    log.check("csp_solution_valid", res.csp.is_solution(res.solution), TOPIC)
    dom = res.partition.C0 | res.partition.C
    log.check("f_domain", set(f) == dom, TOPIC)
    log.check("f_proper", graph.is_proper(f), TOPIC)
    log.check("f_extends_f0", all(f[x] == res.partition.f0[x] for x in res.partition.C0), TOPIC)
    value = f.get
    DRM = list(data.DRM)
    bad = None
    for z in res.Z:
        for beta in power(data.N, 5):
            cz = action.act(G.conj(beta, data.gamma), z)
            if not any(distinguishes(rho_f(action, data, value, action.act(v, z)),
                                     rho_f(action, data, value, action.act(v, cz))) for v in DRM):
                bad = {"z": z, "beta": G.encode(beta)}
                break
        if bad:
            break
    log.check("every_constraint_witnessed", bad is None, TOPIC, counterexample=bad)
    bad = None
    witnesses = {}
    for x in range(action.n):
        gx = action.act(data.gamma, x)
        for s in data.S:
            if distinguishes(rho_f(action, data, value, action.act(s, x)),
                             rho_f(action, data, value, action.act(s, gx))):
                witnesses[x] = G.encode(s)
                break
        else:
            bad = {"x": x}
            break
    log.check("every_point_distinguished", bad is None, TOPIC,
              witness={"sigma_per_point": len(witnesses)}, counterexample=bad)


# --- the witness set E and the probability audit -------------------------------


def e_set(res: Lemma41Result, z: int, beta) -> tuple[list, AuditLog]:
    """The greedy set E for the constraint B(z, β), with its conditions audited."""
    data, action = res.data, res.action
    G = data.group
    log = AuditLog()
    C0, C = res.partition.C0, res.partition.C
    c = G.conj(beta, data.gamma)
    cz = action.act(c, z)
    E1 = [v for v in data.R * data.M if action.act(v, z) in res.C_prime]
    E2 = [v for v in data.Q * GroupSubset.of(G, E1) if G.conj(v, c) not in data.H]
    E3 = [v for v in E2 if action.image(data.W, [action.act(v, cz)]) <= (C0 | C)]
    blocks = {v: {G.mul(d, v) for d in data.D} | {G.mul(w, G.mul(v, c)) for w in data.W} for v in E3}
    E, used = [], set()
    for v in E3:
        if used.isdisjoint(blocks[v]):
            E.append(v)
            used |= blocks[v]
    deg = max((sum(1 for u in E3 if u != v and not blocks[u].isdisjoint(blocks[v])) for v in E3), default=0)
    log.check("E1_size", len(E1) * len(data.R) >= len(data.M), TOPIC, witness={"E1": len(E1)})
    log.check("overlap_degree_below_4D2", deg < 4 * len(data.D) ** 2, TOPIC, witness={"degree": deg})
    log.check("a_conjugate_outside_H", all(G.conj(v, c) not in data.H for v in E), TOPIC)
    FWe = power(data.F | data.W, data.e_V)
    log.check("b_neighbourhood_in_C", all(action.image(FWe, [action.act(v, z)]) <= C for v in E), TOPIC)
    log.check("c_shifted_window_coloured",
              all(action.image(data.W, [action.act(v, cz)]) <= (C0 | C) for v in E), TOPIC)
    log.check("d_blocks_disjoint",
              all(blocks[u].isdisjoint(blocks[v]) for i, u in enumerate(E) for v in E[i + 1:]), TOPIC)
    need = math.ceil(Fraction(len(data.M), 8 * len(data.D) ** 3 * len(data.R)))
    log.check("e_size_bound", len(E) >= need, TOPIC, witness={"E": len(E), "required": need})
    return E, log


@dataclass
class ProbabilityReport:
    p: Fraction
    p_brute: Fraction | None
    p_E: Fraction | None
    p_E_factorised: Fraction | None
    bound_E: Fraction
    bound_M: Fraction
    E: list
    estimate: dict | None
    audits: AuditLog

    def to_json(self) -> dict:
        s = lambda v: None if v is None else str(v)
        return {"p": s(self.p), "p_brute": s(self.p_brute), "p_E": s(self.p_E),
                "p_E_factorised": s(self.p_E_factorised), "bound_E": s(self.bound_E),
                "bound_M": s(self.bound_M), "E_size": len(self.E), "estimate": self.estimate,
                "audits": self.audits.to_json()}


def probability_audit(res: Lemma41Result, index: int, mode: str = "exact",
                      samples: int = 2000, seed: int = 0) -> ProbabilityReport:
    """Check ``p(B) ≤ p_E ≤ (1 - ℓ^-|D|)^|E| ≤ (1 - ℓ^-|D|)^⌈c|M|⌉`` for one constraint.

    Exact mode also recomputes p by enumerating every extension of g to
    ``V = C ∩ N·Δ`` directly, and recomputes p_E both directly and through
    the product over ν in E of the per-block extension counts.
    """
    data, action = res.data, res.action
    log = AuditLog()
    z, beta, c = res.keys[index]
    con = res.csp.constraints[index]
    dom = res.deltas[index]
    cz = action.act(c, z)
    E, elog = e_set(res, z, beta)
    log.extend(elog, "E.")
    base = 1 - Fraction(1, data.ell ** len(data.D))
    bound_E = base ** len(E)
    need = math.ceil(Fraction(len(data.M), 8 * len(data.D) ** 3 * len(data.R)))
    bound_M = base ** need
    p = constraint_probability(con, res.csp)
    graph = schreier_graph(action, data.F)
    nb = lambda q: graph.adj[q]
    V = sorted(p_ for zz in dom for p_ in res.regions[zz])
    DRM = list(data.DRM)
    pairs = [(action.act(v, z), action.act(v, cz)) for v in DRM]
    Epairs = [(action.act(v, z), action.act(v, cz)) for v in E]

    def rho(col, x):
        return rho_f(action, data, col.get, x)

    report = ProbabilityReport(p, None, None, None, bound_E, bound_M, E, None, log)
    if mode == "exact":
        total = viol = eq_E = 0
        for vals in proper_extensions(V, nb, data.ell, res.g):
            col = dict(res.g)
            col.update(zip(V, vals))
            total += 1
            if not any(distinguishes(rho(col, a), rho(col, b)) for a, b in pairs):
                viol += 1
            if all(not distinguishes(rho(col, a), rho(col, b)) for a, b in Epairs):
                eq_E += 1
        p_brute = Fraction(viol, total)
        p_E = Fraction(eq_E, total)
        report.p_brute, report.p_E = p_brute, p_E
        log.check("p_matches_enumeration", p == p_brute, TOPIC,
                  witness={"p": str(p)}, counterexample={"lists": str(p), "brute": str(p_brute)})
        # factorisation over the blocks V_ν
        FWe = power(data.F | data.W, data.e_V)
        Vnu = {v: sorted(action.image(FWe, [action.act(v, z)])) for v in E}
        V1 = set().union(*Vnu.values()) if E else set()
        V0 = [x for x in V if x not in V1]
        num = den = 0
        strict = True
        per_factor = True
        for psi in proper_extensions(V0, lambda q: [u for u in graph.adj[q] if u not in V1],
                                     data.ell, res.g):
            base_col = dict(res.g)
            base_col.update(zip(V0, psi))
            prod_all = prod_eq = 1
            for v, (a, b) in zip(E, Epairs):
                n_all = n_eq = 0
                for xi in proper_extensions(Vnu[v], nb, data.ell, base_col):
                    col = dict(base_col)
                    col.update(zip(Vnu[v], xi))
                    n_all += 1
                    if not distinguishes(rho(col, a), rho(col, b)):
                        n_eq += 1
                if n_eq == n_all:
                    strict = False
                if n_all and Fraction(n_eq, n_all) > base:
                    per_factor = False
                prod_all *= n_all
                prod_eq *= n_eq
            num += prod_eq
            den += prod_all
        p_fact = Fraction(num, den)
        report.p_E_factorised = p_fact
        log.check("p_E_factorises", p_fact == p_E, TOPIC,
                  counterexample={"direct": str(p_E), "factorised": str(p_fact)})
        log.check("some_extension_distinguishes_each_block", strict, TOPIC)
        log.check("per_block_ratio_bound", per_factor, TOPIC)
        log.check("p_at_most_p_E", p <= p_E, TOPIC)
        log.check("p_E_at_most_bound_E", p_E <= bound_E, TOPIC,
                  witness={"p_E": str(p_E), "bound": str(bound_E)})
    elif mode == "sampled":
        lists = [res.cols[zz] for zz in dom]
        hits = 0
        for t in range(samples):
            vals = [L[uniform_index(seed, t, j, len(L))] for j, L in enumerate(lists)]
            hits += con.violated_by(vals)
        est = hits / samples
        eps = math.sqrt(math.log(2 / 0.01) / (2 * samples))  # Hoeffding, 99%
        report.estimate = {"samples": samples, "seed": seed, "estimate": est,
                           "interval": [max(0.0, est - eps), min(1.0, est + eps)]}
        log.check("estimate_consistent_with_p", est - eps <= float(p) <= est + eps, TOPIC,
                  witness=report.estimate)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    log.check("p_at_most_bound_M", p <= bound_M, TOPIC, witness={"p": str(p), "bound": str(bound_M)})
    log.check("bound_E_at_most_bound_M", bound_E <= bound_M, TOPIC)
    return report


# --- ready-made finite instances ---------------------------------------------


def _eval_rule(W: GroupSubset, ell: int) -> LocalRule:
    i0 = W.elements.index(W.group.identity)
    return LocalRule.from_function(W, ell, ell, lambda p: p[i0])


def instance(name: str, e_D: int = 2, e_S: int = 3):
    """(action, data, partition) for one of the built-in instances:
    ``Z24``, ``Z2xZ16`` and ``D12``."""
    if name == "Z24":
        G = cyclic(24)
        F = GroupSubset.of(G, [1, 23])
        W = GroupSubset.of(G, [23, 0, 1])
        data = lemma41_sets(F, 3, W, _eval_rule(W, 3), GroupSubset.of(G, range(-6 % 24, 24)) |
                            GroupSubset.of(G, range(0, 7)), GroupSubset.of(G, [0, 6, 18]), 3, e_D, e_S)
        centers, ucenters = [0, 12], [7]
    elif name == "Z2xZ16":
        G = direct_product(cyclic(2), cyclic(16))
        e2, h0 = 1, 16
        F = GroupSubset.of(G, [e2, 15])
        W = GroupSubset.of(G, [0, h0])
        tau = LocalRule.from_function(W, 3, 3, lambda p: (p[0] + p[1]) % 3)
        data = lemma41_sets(F, 3, W, tau, GroupSubset.of(G, G.elements()),
                            GroupSubset.of(G, [0]), 5, e_D, e_S)
        centers, ucenters = [0], [9]
    elif name == "D12":
        G = dihedral(12)
        s = 12
        W = GroupSubset.of(G, [0, s])
        tau = LocalRule.from_function(W, 2, 2, lambda p: p[0] ^ p[1])
        data = lemma41_sets(GroupSubset.of(G, []), 2, W, tau, GroupSubset.of(G, G.elements()),
                            GroupSubset.of(G, [0]), s, e_D, e_S)
        centers, ucenters = [0], []
    else:
        raise DomainError(f"unknown instance {name!r}")
    action = translation_action(G)
    return action, data, build_partition(action, data, centers, ucenters)


INSTANCES = ("Z24", "Z2xZ16", "D12")
