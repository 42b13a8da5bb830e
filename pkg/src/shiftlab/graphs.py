"""Schreier graphs, greedy independent sets, colouring extension, and the
syndetic / separated predicates on finite actions.

Every greedy procedure scans vertices in increasing point index, which for
translation actions is the canonical group order.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from . import caps
from .actions import FiniteAction, PointFunction, UNDEFINED
from .errors import CapExceeded, DomainError, HypothesisFailure
from .groups import GroupSubset, symmetrize


@dataclass
class FiniteGraph:
    """An undirected simple graph on the points ``0..n-1``.

    ``adj[v]`` is the sorted tuple of neighbours of ``v``.  ``vertices`` may
    be a proper subset of ``range(n)`` for induced subgraphs.
    """

    n: int
    adj: list
    vertices: tuple = None
    max_degree: int = field(init=False)

    def __post_init__(self):
        if self.vertices is None:
            self.vertices = tuple(range(self.n))
        vs = set(self.vertices)
        for v in self.vertices:
            for u in self.adj[v]:
                if u == v:
                    raise DomainError(f"self-loop at {v}")
                if u not in vs or v not in self.adj[u]:
                    raise DomainError(f"adjacency is not symmetric at {v}-{u}")
        self.max_degree = max((len(self.adj[v]) for v in self.vertices), default=0)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> FiniteGraph:
        nb = [set() for _ in range(n)]
        for u, v in edges:
            if u != v:
                nb[u].add(v)
                nb[v].add(u)
        return cls(n, [tuple(sorted(s)) for s in nb])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in self.vertices for v in self.adj[u] if u < v]

    def induced(self, U: Iterable[int]) -> FiniteGraph:
        keep = set(U)
        adj = [tuple(u for u in self.adj[v] if u in keep) if v in keep else () for v in range(self.n)]
        return FiniteGraph(self.n, adj, tuple(sorted(keep)))

    def is_independent(self, I: Iterable[int]) -> bool:
        s = set(I)
        return all(u not in s for v in s for u in self.adj[v])

    def is_proper(self, coloring: dict | PointFunction, domain: Iterable[int] | None = None) -> bool:
        col = _as_dict(coloring)
        dom = set(col) if domain is None else set(domain)
        return all(col[u] != col[v] for v in dom for u in self.adj[v] if u in dom)

    def to_json(self, encode=lambda v: v) -> dict:
        return {"vertices": [encode(v) for v in self.vertices],
                "edges": [[encode(u), encode(v)] for u, v in self.edges()]}


def _as_dict(coloring) -> dict:
    if isinstance(coloring, PointFunction):
        return {x: int(c) for x, c in enumerate(coloring.values) if c != UNDEFINED}
    return dict(coloring)


def schreier_graph(action: FiniteAction, F: GroupSubset) -> FiniteGraph:
    """G(X, F): distinct x, y adjacent iff ``y = σ·x`` for some σ in F ∪ F^-1."""
    if not action.is_F_free(F):
        raise HypothesisFailure("action is not F-free")
    gens = list(symmetrize(F, False))
    if not gens:
        return FiniteGraph(action.n, [() for _ in range(action.n)])
    nbrs = action.table[gens]  # (|F|, n)
    adj = [tuple(sorted(set(nbrs[:, x].tolist()) - {x})) for x in range(action.n)]
    return FiniteGraph(action.n, adj)


def greedy_mis(G: FiniteGraph, J: Iterable[int] = (), allowed: Iterable[int] | None = None) -> set[int]:
    """A maximal independent set of ``G[allowed]`` containing J.

    Vertices are scanned in increasing order; a vertex joins when none of its
    neighbours has joined.
    """
    J = set(J)
    pool = set(G.vertices) if allowed is None else set(allowed) & set(G.vertices)
    if not J <= pool:
        raise DomainError("J must lie inside the allowed vertex set")
    if not G.is_independent(J):
        raise DomainError("J is not independent")
    I = set(J)
    blocked = {u for v in I for u in G.adj[v]}
    for v in sorted(pool):
        if v in I or v in blocked:
            continue
        I.add(v)
        blocked.update(G.adj[v])
    return I


def partition_independent(G: FiniteGraph) -> list[set[int]]:
    """Greedy sequential colouring: a partition into at most Δ+1 independent sets."""
    color: dict[int, int] = {}
    for v in G.vertices:
        used = {color[u] for u in G.adj[v] if u in color}
        c = 0
        while c in used:
            c += 1
        color[v] = c
    classes: list[set[int]] = [set() for _ in range(max(color.values(), default=-1) + 1)]
    for v, c in color.items():
        classes[c].add(v)
    return classes


def extend_proper_coloring(G: FiniteGraph, g: dict | PointFunction, ell: int) -> dict[int, int]:
    """Extend a proper partial colouring to all vertices with ``ell`` colours.

    For each colour i in turn, take a maximal independent set I_i containing
    the class ``g^-1(i)`` in the graph with the earlier I_j and the later
    classes removed.  When ``ell > Δ`` these sets cover every vertex.
    """
    if ell <= G.max_degree:
        raise HypothesisFailure(f"need ell >= max_degree + 1 = {G.max_degree + 1}, got {ell}")
    gd = _as_dict(g)
    if any(not 0 <= c < ell for c in gd.values()):
        raise DomainError("seed colouring uses colours outside range(ell)")
    if not G.is_proper(gd):
        raise DomainError("seed colouring is not proper")
    J = [set() for _ in range(ell)]
    for v, c in gd.items():
        J[c].add(v)
    taken: set[int] = set()
    later = set(gd)
    out: dict[int, int] = {}
    for i in range(ell):
        later -= J[i]
        allowed = set(G.vertices) - taken - later
        I = greedy_mis(G, J[i], allowed)
        for v in I:
            out[v] = i
        taken |= I
    missing = set(G.vertices) - taken
    if missing:  # impossible when ell > max degree
        raise AssertionError(f"colour classes failed to cover {sorted(missing)[:5]}")
    return out


# --- syndetic and separated sets -------------------------------------------


def _mask(action: FiniteAction, A: Iterable[int]) -> np.ndarray:
    m = np.zeros(action.n, dtype=bool)
    idx = list(A)
    if idx:
        m[idx] = True
    return m


def is_syndetic(action: FiniteAction, A: Iterable[int], S: GroupSubset | Iterable) -> bool:
    """``S^-1 · A = X``: every point x has some σ in S with σ·x in A."""
    els = list(S)
    if action.n == 0:
        return True
    if not els:
        return False
    m = _mask(action, A)
    return bool(m[action.table[els]].any(axis=0).all())


def sd_core(action: FiniteAction, A: Iterable[int], D) -> set[int]:
    return action.core(D, A)


def is_sd_syndetic(action: FiniteAction, A: Iterable[int], S, D) -> bool:
    return is_syndetic(action, sd_core(action, A, D), S)


def is_separated(action: FiniteAction, A: Iterable[int], S) -> bool:
    """Independence of A in the Schreier graph G(X, S)."""
    m = _mask(action, A)
    pts = np.nonzero(m)[0]
    G = action.group
    for s in S:
        for t in (s, G.inv(s)):
            if t == G.identity:
                continue
            img = action.table[t, pts]
            if (m[img] & (img != pts)).any():
                return False
    return True


def check_sd_witness(action: FiniteAction, A: Iterable[int], S, D, witness: Iterable[int]) -> bool:
    """Is ``witness`` an S-separated set with A ⊆ D·witness?"""
    w = list(witness)
    return set(A) <= action.image(D, w) and is_separated(action, w, S)


def sd_separated(action: FiniteAction, A: Iterable[int], S, D,
                 hint: Iterable[int] | None = None, exact: bool = True) -> list[int] | None:
    """Search for an S-separated A' with ``A ⊆ D·A'``.

    A supplied ``hint`` is checked first.  The exact search branches on the
    first uncovered point a of A over the candidates ``δ^-1·a``; it gives up
    with :class:`CapExceeded` after ``caps.SEPARATION_SEARCH_CAP`` nodes.
    With ``exact=False`` only a greedy candidate is tried.
    """
    A = sorted(set(A))
    if hint is not None and check_sd_witness(action, A, S, D, hint):
        return sorted(set(hint))
    G = action.group
    Dinv = [G.inv(d) for d in D]
    sym = [t for s in S for t in {s, G.inv(s)} if t != G.identity]

    def conflicts(y, chosen):
        return any(action.act(t, y) in chosen and action.act(t, y) != y for t in sym)

    if not exact:
        chosen: set[int] = set()
        for a in A:
            if a in action.image(D, chosen):
                continue
            for d in Dinv:
                y = action.act(d, a)
                if not conflicts(y, chosen):
                    chosen.add(y)
                    break
            else:
                return None
        return sorted(chosen) if check_sd_witness(action, A, S, D, chosen) else None

    nodes = 0

    def search(chosen: frozenset, covered: frozenset):
        nonlocal nodes
        nodes += 1
        if nodes > caps.SEPARATION_SEARCH_CAP:
            raise CapExceeded("sd-separation search exceeded its node cap")
        rest = [a for a in A if a not in covered]
        if not rest:
            return chosen
        a = rest[0]
        for y in sorted({action.act(d, a) for d in Dinv}):
            if y in chosen or conflicts(y, chosen):
                continue
            res = search(chosen | {y}, covered | action.image(D, [y]))
            if res is not None:
                return res
        return None

    found = search(frozenset(), frozenset())
    return None if found is None else sorted(found)


# --- splitting a syndetic set ----------------------------------------------


@dataclass
class SplitResult:
    C: set
    U: set
    U_prime: set
    checks: dict


def split_syndetic_d(action: FiniteAction, V: Iterable[int], R: GroupSubset, S: GroupSubset,
                     T: GroupSubset, T_next: GroupSubset, D: GroupSubset,
                     Q: GroupSubset | None = None) -> SplitResult:
    """Split a (T,D)-syndetic V into C ⊔ U.

    U' is a greedy maximal S-separated subset of ``V' = {x : D·x ⊆ V}``,
    ``U = D·U'`` and ``C = V \\ U``.  The hypotheses are checked first and the
    three promised properties are re-verified afterwards with the predicate
    functions of this module.
    """
    V = set(V)
    if not is_sd_syndetic(action, V, T, D):
        raise HypothesisFailure("V is not (T, D)-syndetic")
    D2 = D * D
    need = D2 * R * R.inverse() * D2
    if not need <= S:
        raise HypothesisFailure("S does not contain D^2 R R^-1 D^2")
    if Q is not None and not len(Q) > len(T) * len(D) ** 2:
        raise HypothesisFailure("|Q| <= |T| |D|^2")
    if not (S * T) <= T_next:
        raise HypothesisFailure("T_next does not contain S T")
    if not action.is_F_free(S):
        raise HypothesisFailure("action is not S-free")
    Vp = action.core(D, V)
    graph = schreier_graph(action, S)
    Up = greedy_mis(graph, (), Vp)
    U = action.image(D, Up)
    C = V - U
    checks = {
        "C_RD_syndetic": is_sd_syndetic(action, C, R, D),
        "U_SD_separated": check_sd_witness(action, U, S, D, Up),
        "U_TnextD_syndetic": is_sd_syndetic(action, U, T_next, D),
        "partition": C.isdisjoint(U) and (C | U) == V,
    }
    if not all(checks.values()):
        raise HypothesisFailure(f"split post-conditions failed: {checks}")
    return SplitResult(C, U, set(Up), checks)


def split_syndetic_plain(action: FiniteAction, V: Iterable[int], R: GroupSubset,
                         S: GroupSubset, T: GroupSubset, T_next: GroupSubset) -> SplitResult:
    """Split a T-syndetic V into an R-syndetic C and an S-separated,
    T_next-syndetic U, with U a greedy maximal S-separated subset of V."""
    V = set(V)
    if not V and action.n:
        raise HypothesisFailure("V is empty, so it cannot be T-syndetic")
    if not is_syndetic(action, V, T):
        raise HypothesisFailure("V is not T-syndetic")
    if not (R * R.inverse()) <= S:
        raise HypothesisFailure("S does not contain R R^-1")
    if not (S * T) <= T_next:
        raise HypothesisFailure("T_next does not contain S T")
    if not action.is_F_free(S):
        raise HypothesisFailure("action is not S-free")
    graph = schreier_graph(action, S)
    U = greedy_mis(graph, (), V)
    C = V - U
    checks = {
        "C_R_syndetic": is_syndetic(action, C, R),
        "U_S_separated": is_separated(action, U, S),
        "U_Tnext_syndetic": is_syndetic(action, U, T_next),
        "partition": C.isdisjoint(U) and (C | U) == V,
    }
    if not all(checks.values()):
        raise HypothesisFailure(f"split post-conditions failed: {checks}")
    return SplitResult(C, U, set(U), checks)


# --- enumerating extensions ------------------------------------------------


def proper_extensions(points, neighbours, ell: int, fixed: dict | None = None, limit: int | None = None):
    """Yield every colouring of ``points`` (as a tuple aligned with them) that
    is proper together with ``fixed``.

    ``neighbours(p)`` lists the neighbours of p; neighbours that are neither
    in ``points`` nor in ``fixed`` are unconstrained.  At most ``limit``
    colourings are produced before :class:`CapExceeded` is raised.
    """
    points = list(points)
    fixed = {} if fixed is None else fixed
    pos = {p: i for i, p in enumerate(points)}
    if len(pos) != len(points):
        raise DomainError("points must be distinct")
    if any(p in fixed for p in points):
        raise DomainError("points to colour overlap the fixed colouring")
    earlier = []
    banned = []
    for i, p in enumerate(points):
        nb = set(neighbours(p)) - {p}
        earlier.append([pos[q] for q in nb if q in pos and pos[q] < i])
        banned.append({fixed[q] for q in nb if q in fixed})
    cap = caps.table_cap() if limit is None else limit
    n = len(points)
    col = [0] * n
    produced = 0

    def ok(i, c):
        return c not in banned[i] and all(col[j] != c for j in earlier[i])

    # iterative depth-first enumeration in lexicographic order
    i = 0
    nxt = [0] * (n + 1)
    if n == 0:
        yield ()
        return
    while i >= 0:
        if i == n:
            produced += 1
            if produced > cap:
                raise CapExceeded("too many extensions to enumerate")
            yield tuple(col)
            i -= 1
            continue
        c = nxt[i]
        while c < ell and not ok(i, c):
            c += 1
        if c >= ell:
            nxt[i] = 0
            i -= 1
            continue
        col[i] = c
        nxt[i] = c + 1
        i += 1
        nxt[i] = 0 if i < n else nxt[i]
