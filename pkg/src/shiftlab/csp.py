"""Constraint satisfaction problems with per-variable colour lists.

A constraint forbids some assignments of colours to its domain.  Two forms
are provided: :class:`Constraint` lists the forbidden assignments, and
:class:`PredicateConstraint` decides violation with a function (used when the
forbidden set is large but easy to test).  All probabilities are exact
:class:`fractions.Fraction` values.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from . import caps
from .errors import CapExceeded, DomainError


@dataclass(frozen=True)
class Constraint:
    """Forbidden assignments on an ordered, duplicate-free domain."""

    domain: tuple
    forbidden: frozenset

    def __post_init__(self):
        if not self.domain:
            raise DomainError("constraint domain must be nonempty")
        if len(set(self.domain)) != len(self.domain):
            raise DomainError("constraint domain has duplicates")
        for b in self.forbidden:
            if len(b) != len(self.domain):
                raise DomainError(f"assignment {b} is not total on the domain")

    @classmethod
    def of(cls, domain: Sequence, forbidden: Iterable[Sequence]) -> Constraint:
        return cls(tuple(domain), frozenset(tuple(b) for b in forbidden))

    def violated_by(self, values: Sequence) -> bool:
        return tuple(values) in self.forbidden

    def status(self, partial: dict):
        """True if violated, False if satisfied, None if still open."""
        if all(v in partial for v in self.domain):
            return self.violated_by([partial[v] for v in self.domain])
        fixed = [(i, partial[v]) for i, v in enumerate(self.domain) if v in partial]
        if not any(all(b[i] == c for i, c in fixed) for b in self.forbidden):
            return False
        return None

    def count_forbidden(self, lists: Sequence[Sequence]) -> int:
        sets = [set(L) for L in lists]
        return sum(1 for b in self.forbidden if all(c in s for c, s in zip(b, sets)))


@dataclass(frozen=True)
class PredicateConstraint:
    """Violation decided by ``violates(values)`` on the domain's colours.

    ``partial(assignment_dict)`` may be given to decide early during
    backtracking; it returns True, False or None like :meth:`Constraint.status`.
    """

    domain: tuple
    violates: Callable = field(compare=False)
    partial: Callable | None = field(default=None, compare=False)
    label: Hashable = None

    def __post_init__(self):
        if not self.domain:
            raise DomainError("constraint domain must be nonempty")
        if len(set(self.domain)) != len(self.domain):
            raise DomainError("constraint domain has duplicates")

    def violated_by(self, values: Sequence) -> bool:
        return bool(self.violates(tuple(values)))

    def status(self, partial: dict):
        if all(v in partial for v in self.domain):
            return self.violated_by([partial[v] for v in self.domain])
        if self.partial is not None:
            return self.partial(partial)
        return None

    def count_forbidden(self, lists: Sequence[Sequence]) -> int:
        size = math.prod(list_size(L) for L in lists)
        caps.check(size, "predicate constraint enumeration")
        return sum(1 for vals in itertools.product(*lists) if self.violates(vals))


class Alphabet:
    """``range(n)`` usable for any n, including n beyond ``sys.maxsize``."""

    def __init__(self, n: int):
        self.n = n

    def __getitem__(self, i):
        if not 0 <= i < self.n:
            raise IndexError(i)
        return i

    def __contains__(self, c):
        return isinstance(c, int) and 0 <= c < self.n

    def __iter__(self):
        return iter(range(self.n))

    def __eq__(self, other):
        return isinstance(other, Alphabet) and other.n == self.n

    def __repr__(self):
        return f"Alphabet({self.n})"


def list_size(L) -> int:
    return L.n if isinstance(L, Alphabet) else len(L)


class CSP:
    """Variables, per-variable colour lists and constraints.

    ``colors`` may be an integer n (every list is ``range(n)``) or a mapping
    from variable to its list.
    """

    def __init__(self, variables: Sequence, colors, constraints: Sequence = ()):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise DomainError("duplicate variables")
        self.index = {v: i for i, v in enumerate(self.variables)}
        if isinstance(colors, int):
            if colors < 1:
                raise DomainError("need at least one colour")
            self.uniform = colors
            lst = tuple(range(colors)) if colors <= 1 << 16 else Alphabet(colors)
            self.lists = {v: lst for v in self.variables}
        else:
            self.uniform = None
            self.lists = {v: tuple(colors[v]) for v in self.variables}
        for v, L in self.lists.items():
            if isinstance(L, Alphabet):
                continue
            if not L:
                raise DomainError(f"empty colour list for {v!r}")
            if len(set(L)) != len(L):
                raise DomainError(f"colour list for {v!r} has duplicates")
        self.constraints = list(constraints)
        for c in self.constraints:
            for v in c.domain:
                if v not in self.index:
                    raise DomainError(f"constraint mentions unknown variable {v!r}")
        self._by_var = None

    @property
    def by_variable(self) -> dict:
        if self._by_var is None:
            bv = {v: [] for v in self.variables}
            for i, c in enumerate(self.constraints):
                for v in c.domain:
                    bv[v].append(i)
            self._by_var = bv
        return self._by_var

    def list_size(self, v) -> int:
        return list_size(self.lists[v])

    def violated(self, assignment: dict) -> list[int]:
        return [i for i, c in enumerate(self.constraints)
                if c.violated_by([assignment[v] for v in c.domain])]

    def is_solution(self, assignment: dict) -> bool:
        if set(assignment) != set(self.variables):
            return False
        if any(assignment[v] not in self.lists[v] for v in self.variables):
            return False
        return not self.violated(assignment)

    def to_json(self) -> dict:
        out = {"variables": list(self.variables)}
        if self.uniform is not None:
            out["colors"] = self.uniform
        else:
            out["lists"] = {str(v): list(self.lists[v]) for v in self.variables}
        out["constraints"] = [{"domain": list(c.domain), "forbidden": sorted(list(b) for b in c.forbidden)}
                              for c in self.constraints if isinstance(c, Constraint)]
        return out

    @classmethod
    def from_json(cls, data: dict) -> CSP:
        variables = list(data["variables"])
        if "colors" in data:
            colors = int(data["colors"])
        else:
            raw = data["lists"]
            colors = {v: raw[str(v)] for v in variables}
        cons = [Constraint.of(c["domain"], c["forbidden"]) for c in data.get("constraints", [])]
        return cls(variables, colors, cons)


def constraint_probability(c, csp: CSP) -> Fraction:
    """Probability that a uniformly random list-respecting assignment violates c."""
    lists = [csp.lists[v] for v in c.domain]
    return Fraction(c.count_forbidden(lists), math.prod(list_size(L) for L in lists))


@dataclass(frozen=True)
class LLLParams:
    p: Fraction
    d: int
    vdeg: int
    ord: int

    def to_json(self) -> dict:
        return {"p": str(self.p), "d": self.d, "vdeg": self.vdeg, "ord": self.ord}


def compute_params(csp: CSP) -> LLLParams:
    if not csp.constraints:
        return LLLParams(Fraction(0), 0, 0, 0)
    p = max(constraint_probability(c, csp) for c in csp.constraints)
    bv = csp.by_variable
    d = 0
    for i, c in enumerate(csp.constraints):
        nb = set()
        for v in c.domain:
            nb.update(bv[v])
        nb.discard(i)
        d = max(d, len(nb))
    vdeg = max(len(ix) for ix in bv.values()) if bv else 0
    order = max(len(c.domain) for c in csp.constraints)
    return LLLParams(p, d, vdeg, order)


# --- exact solvers -------------------------------------------------------------


UNSAT = "UNSAT"


def brute_force(csp: CSP):
    """First solution in lexicographic order of the lists, or ``UNSAT``."""
    size = math.prod(csp.list_size(v) for v in csp.variables)
    caps.check(size, "brute-force search space")
    lists = [csp.lists[v] for v in csp.variables]
    for vals in itertools.product(*lists):
        a = dict(zip(csp.variables, vals))
        if not csp.violated(a):
            return a
    return UNSAT


def all_solutions(csp: CSP) -> list[dict]:
    size = math.prod(csp.list_size(v) for v in csp.variables)
    caps.check(size, "solution enumeration")
    lists = [csp.lists[v] for v in csp.variables]
    out = []
    for vals in itertools.product(*lists):
        a = dict(zip(csp.variables, vals))
        if not csp.violated(a):
            out.append(a)
    return out


def components(csp: CSP) -> list[list]:
    """Variables grouped by connectivity through shared constraints."""
    parent = {v: v for v in csp.variables}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for c in csp.constraints:
        r = find(c.domain[0])
        for v in c.domain[1:]:
            s = find(v)
            if s != r:
                parent[s] = r
    groups: dict = {}
    for v in csp.variables:
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values(), key=lambda g: csp.index[g[0]])


def backtracking(csp: CSP, node_cap: int | None = None):
    """Exact depth-first search, one connected component at a time.

    Constraints are checked as soon as they can be decided (``status``).
    Returns a solution dict or ``UNSAT``; raises :class:`CapExceeded` when
    the node budget runs out.
    """
    cap = caps.table_cap() if node_cap is None else node_cap
    nodes = 0
    bv = csp.by_variable
    solution: dict = {}
    for comp in components(csp):
        order = comp
        assign: dict = {}
        budget = [cap - nodes]
        ok = _dfs(order, csp, assign, bv, budget)
        nodes = cap - budget[0]
        if not ok:
            return UNSAT
        solution.update(assign)
    return solution


def _dfs(order, csp, assign, bv, budget: list) -> bool:
    """Iterative depth-first search over ``order`` (avoids recursion limits)."""
    n = len(order)
    if n == 0:
        return True
    choice = [-1] * n
    i = 0
    while 0 <= i < n:
        v = order[i]
        L = csp.lists[v]
        size = list_size(L)
        choice[i] += 1
        assign.pop(v, None)
        advanced = False
        while choice[i] < size:
            budget[0] -= 1
            if budget[0] < 0:
                raise CapExceeded("backtracking node budget exhausted")
            assign[v] = L[choice[i]]
            if all(csp.constraints[j].status(assign) is not True for j in bv[v]):
                advanced = True
                break
            choice[i] += 1
        if advanced:
            i += 1
            if i < n:
                choice[i] = -1
        else:
            assign.pop(v, None)
            choice[i] = -1
            i -= 1
    return i == n


# --- list reduction --------------------------------------------------------------


@dataclass
class ListReduction:
    """Uniform-alphabet CSP equivalent to a list CSP, with its decoder.

    ``n`` is divisible by every list size; ``h(S, φ)`` maps ``range(n)`` onto
    S in contiguous blocks of size ``n/|S|`` following the universe order.
    """

    csp: CSP
    n: int
    universe: tuple
    original: CSP

    def h(self, v, phi: int):
        S = self._sorted_list(v)
        return S[phi // (self.n // len(S))]

    def _sorted_list(self, v):
        cache = self.__dict__.setdefault("_cache", {})
        if v not in cache:
            rank = self.__dict__.setdefault("_rank", {c: i for i, c in enumerate(self.universe)})
            cache[v] = tuple(sorted(self.original.lists[v], key=rank.__getitem__))
        return cache[v]

    def decode(self, assignment: dict) -> dict:
        return {v: self.h(v, phi) for v, phi in assignment.items()}

    def multiplicity(self) -> int:
        """Number of reduced solutions per original solution."""
        return math.prod(self.n // len(self.original.lists[v]) for v in self.original.variables)


class ReducedConstraint(PredicateConstraint):
    pass


def list_reduction(csp: CSP, universe: Sequence | None = None) -> ListReduction:
    """Encode per-variable lists into the uniform alphabet ``range(n)``."""
    if universe is None:
        seen = {}
        for v in csp.variables:
            for c in csp.lists[v]:
                seen.setdefault(c, None)
        try:
            universe = tuple(sorted(seen))
        except TypeError:
            universe = tuple(seen)
    universe = tuple(universe)
    uni = set(universe)
    for v in csp.variables:
        if not set(csp.lists[v]) <= uni:
            raise DomainError(f"list of {v!r} is not inside the colour universe")
    n = math.lcm(*range(1, len(universe) + 1))
    red = ListReduction(None, n, universe, csp)
    cons = []
    for c in csp.constraints:
        dom = c.domain

        def violates(vals, c=c, dom=dom):
            return c.violated_by([red.h(v, phi) for v, phi in zip(dom, vals)])

        def partial(assign, c=c, dom=dom):
            return c.status({v: red.h(v, assign[v]) for v in dom if v in assign})

        cons.append(ReducedConstraint(dom, violates, partial, label=("reduced", len(cons))))
    red.csp = CSP(csp.variables, n, cons)
    return red


def reduced_forbidden_count(red: ListReduction, index: int) -> int:
    """|B'| via preimage sizes: each forbidden list assignment has
    ``∏ n/|C_x|`` preimages."""
    c = red.original.constraints[index]
    lists = [red.original.lists[v] for v in c.domain]
    mult = math.prod(red.n // len(L) for L in lists)
    return c.count_forbidden(lists) * mult


def reduced_probability(red: ListReduction, index: int) -> Fraction:
    c = red.original.constraints[index]
    return Fraction(reduced_forbidden_count(red, index), red.n ** len(c.domain))
