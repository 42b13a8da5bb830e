"""Configurations, the shift action, SFTs, local rules and coding maps.

A configuration on a finite group ``G`` is a tuple of symbols indexed by the
elements of ``G`` in canonical order.  The shift is the left action
``(γ·x)(δ) = x(δγ)``.  An equivariant map out of a ``G``-set is determined by
the single function ``f(x) = π(x)(1)``, and conversely ``π_f(x)(γ) = f(γ·x)``.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import caps
from .actions import FiniteAction, PointFunction, shift_action, _codes
from .errors import DomainError
from .groups import FiniteGroup, GroupSubset, is_normal, is_subgroup, symmetrize


@dataclass(frozen=True)
class Configuration:
    group: FiniteGroup
    k: int
    values: tuple

    def __post_init__(self):
        if not isinstance(self.group, FiniteGroup):
            raise DomainError("configurations are stored only over finite groups")
        if len(self.values) != self.group.order:
            raise DomainError("configuration must assign a value to every element")
        if any(not 0 <= v < self.k for v in self.values):
            raise DomainError("configuration value outside the alphabet")

    @classmethod
    def of(cls, group, k, values) -> Configuration:
        return cls(group, k, tuple(int(v) for v in values))

    def __getitem__(self, g) -> int:
        return self.values[g]

    def restrict(self, W: Iterable) -> tuple:
        return tuple(self.values[w] for w in W)

    def __hash__(self):
        return hash((self.k, self.values))


def shift(gamma, x: Configuration) -> Configuration:
    G = x.group
    G.check(gamma)
    col = G.table[:, gamma]
    return Configuration(G, x.k, tuple(x.values[int(c)] for c in col))


def stabilizer(x: Configuration) -> GroupSubset:
    G = x.group
    v = np.asarray(x.values)
    # γ fixes x iff x(δγ) = x(δ) for all δ; columns of G.table give δγ
    fixed = (v[G.table] == v[:, None]).all(axis=0)
    return GroupSubset(G, tuple(int(g) for g in np.nonzero(fixed)[0]))


def all_configurations(G: FiniteGroup, k: int) -> np.ndarray:
    """Every configuration as a row, in lexicographic order."""
    n = G.order
    caps.check(k ** n * n, f"configurations {k}^{n}")
    if k == 0:
        return np.zeros((0, n), dtype=np.int64)
    idx = np.arange(k ** n, dtype=np.int64)
    powers = np.array([k ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % k


def free_rows(G: FiniteGroup, k: int) -> np.ndarray:
    """Rows of all configurations with trivial stabilizer, in lexicographic order."""
    n = G.order
    caps.check(k ** n * n, f"configurations {k}^{n}")
    if k == 0:
        return np.zeros((0, n), dtype=np.int64)
    out = []
    powers = np.array([k ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    chunk = 1 << 16
    total = k ** n
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        rows = (idx[:, None] // powers[None, :]) % k
        periodic = np.zeros(len(rows), dtype=bool)
        for g in range(1, n):
            periodic |= (rows[:, G.table[:, g]] == rows).all(axis=1)
        out.append(rows[~periodic])
    return np.concatenate(out) if out else np.zeros((0, n), dtype=np.int64)


def free_part(G: FiniteGroup, k: int) -> list[Configuration]:
    return [Configuration(G, k, tuple(int(v) for v in row)) for row in free_rows(G, k)]


def free_part_action(G: FiniteGroup, k: int) -> FiniteAction:
    """The shift action on the free part of ``k^G``."""
    return shift_action(G, free_rows(G, k), k)


@dataclass(frozen=True)
class SFT:
    """A subshift of finite type given by a window and allowed patterns.

    Patterns are tuples aligned with ``window.elements``.
    """

    window: GroupSubset
    k: int
    allowed: frozenset = field(repr=False)

    def __post_init__(self):
        if len(self.window) == 0:
            raise DomainError("SFT window must be nonempty")
        for p in self.allowed:
            if len(p) != len(self.window) or any(not 0 <= v < self.k for v in p):
                raise DomainError(f"pattern {p} is not a total pattern on the window")

    def accepts_pattern(self, pattern: Sequence[int]) -> bool:
        return tuple(pattern) in self.allowed

    def restriction(self, gamma, x: Configuration) -> tuple:
        """The pattern ``(γ·x)↾W``, i.e. ``w ↦ x(wγ)``."""
        G = x.group
        return tuple(x.values[G.table[w, gamma]] for w in self.window)


def sft_membership(S: SFT, x: Configuration) -> bool:
    if S.k != x.k:
        raise DomainError("alphabet mismatch between SFT and configuration")
    if S.window.group != x.group:
        raise DomainError("SFT and configuration live over different groups")
    if not S.allowed:
        return False
    return all(S.restriction(g, x) in S.allowed for g in x.group.elements())


def sft_membership_rows(S: SFT, rows: np.ndarray) -> np.ndarray:
    """Vectorised membership for many configurations (rows)."""
    G = S.window.group
    W = list(S.window)
    allowed = np.array(sorted(S.allowed), dtype=np.int64).reshape(-1, len(W))
    acodes = np.sort(_codes(allowed, S.k)) if len(allowed) else np.zeros(0, dtype=np.int64)
    ok = np.ones(len(rows), dtype=bool)
    if len(acodes) == 0:
        return ~ok
    for g in range(G.order):
        pats = rows[:, G.table[W, g]]
        c = _codes(pats, S.k)
        pos = np.clip(np.searchsorted(acodes, c), 0, len(acodes) - 1)
        ok &= acodes[pos] == c
    return ok


def sft_col(F: GroupSubset, ell: int) -> SFT:
    """Proper ``ell``-colourings of the Cayley graph ``G(Γ, F)``.

    Window ``F ∪ {1}``; a pattern is allowed iff its value at each σ in F
    differs from its value at the identity.
    """
    G = F.group
    if G.identity in F:
        raise DomainError("F must not contain the identity")
    if F.inverse() != F:
        raise DomainError("F must be symmetric")
    W = F | GroupSubset(G, (G.identity,))
    caps.check(ell ** len(W), "Col pattern table")
    i0 = W.elements.index(G.identity)
    allowed = frozenset(p for p in itertools.product(range(ell), repeat=len(W))
                        if all(p[j] != p[i0] for j in range(len(W)) if j != i0))
    return SFT(W, ell, allowed)


def sft_xh(H: GroupSubset, k: int) -> SFT:
    """Configurations constant on the right cosets ``Hγ`` of a subgroup H.

    With the window ``H`` the pattern at γ is ``h ↦ x(hγ)``, so requiring it
    to be constant says exactly that x is constant on ``Hγ``.
    """
    if not is_subgroup(H):
        raise DomainError("H must be a subgroup")
    return SFT(H, k, frozenset((c,) * len(H) for c in range(k)))


@dataclass(frozen=True)
class LocalRule:
    """A map from patterns on a window to ``{0..m-1}``.

    ``table`` is keyed by patterns (tuples aligned with the window); patterns
    absent from the table are outside the rule's admissible domain.
    """

    window: GroupSubset
    k: int
    m: int
    table: dict = field(repr=False, hash=False, compare=False)

    def __post_init__(self):
        for p, v in self.table.items():
            if len(p) != len(self.window) or not 0 <= v < self.m:
                raise DomainError(f"bad table entry {p!r} -> {v!r}")

    @classmethod
    def from_function(cls, window: GroupSubset, k: int, m: int,
                      fn: Callable[[tuple], int], admissible: Iterable[tuple] | None = None):
        if admissible is None:
            caps.check(k ** len(window), "local rule table")
            admissible = itertools.product(range(k), repeat=len(window))
        return cls(window, k, m, {tuple(p): int(fn(tuple(p))) for p in admissible})

    def __call__(self, pattern: Sequence[int]) -> int:
        try:
            return self.table[tuple(pattern)]
        except KeyError:
            raise DomainError(f"pattern {tuple(pattern)} outside the rule's domain") from None

    def admissible(self, pattern) -> bool:
        return tuple(pattern) in self.table

    def on_configuration(self, x: Configuration) -> int:
        """ρ(x) = τ(x↾W)."""
        return self(x.restrict(self.window))

    def point_function(self, action: FiniteAction) -> PointFunction:
        """Evaluate on every point of a shift action (points are configurations)."""
        W = list(self.window)
        vals = [self(tuple(lab[w] for w in W)) for lab in action.labels]
        return PointFunction(action, vals, self.m)


def coding_image(action: FiniteAction, f: PointFunction, x: int) -> tuple:
    if not f.is_total:
        raise DomainError("coding maps need a total function")
    return tuple(int(v) for v in f.values[action.table[:, x]])


def coding_map(action: FiniteAction, f: PointFunction, x: int) -> Configuration:
    """π_f(x)(γ) = f(γ·x)."""
    return Configuration(action.group, f.k, coding_image(action, f, x))


def coding_matrix(action: FiniteAction, f: PointFunction) -> np.ndarray:
    """Row x is the coding image π_f(x)."""
    if not f.is_total:
        raise DomainError("coding maps need a total function")
    return f.values[action.table].T


def map_of_rule(action: FiniteAction, f: PointFunction) -> list[Configuration]:
    """The equivariant map π_f as the list of images of all points."""
    return [coding_map(action, f, x) for x in action.points]


def rule_of_map(action: FiniteAction, images: Sequence[Configuration]) -> PointFunction:
    """Recover f(x) = π(x)(1), rejecting maps that are not equivariant."""
    if len(images) != action.n:
        raise DomainError("one image per point is required")
    G = action.group
    k = max(c.k for c in images) if images else 1
    for x in action.points:
        for g in G.elements():
            if shift(g, images[x]) != images[action.act(g, x)]:
                raise DomainError(f"map is not equivariant at point {x}, element {g}")
    return PointFunction(action, [c.values[G.identity] for c in images], k)


def map_stabilizer(action: FiniteAction, f: PointFunction) -> GroupSubset:
    """Stab(π_f): elements fixing every coding image."""
    M = coding_matrix(action, f)  # (n, |G|)
    G = action.group
    fixed = [g for g in G.elements() if np.array_equal(M[:, G.table[:, g]], M)]
    return GroupSubset(G, tuple(fixed))


def map_stabilizer_is_normal(action: FiniteAction, f: PointFunction) -> bool:
    return is_normal(map_stabilizer(action, f))


def prop15_rule(H: GroupSubset, k: int) -> LocalRule:
    """The rule ``x ↦ 0`` if x vanishes somewhere on H, else 1.

    Its coding images are constant on the right cosets of H.
    """
    if not is_subgroup(H):
        raise DomainError("H must be a subgroup")
    return LocalRule.from_function(H, k, 2, lambda p: 0 if 0 in p else 1)


def is_proper_on_schreier(action: FiniteAction, F: GroupSubset, f: PointFunction) -> bool:
    """Direct check that f colours adjacent points of G(X, F) differently."""
    for s in symmetrize(F, False):
        if (f.values[action.table[s]] == f.values).any():
            return False
    return True


def col_membership_rows(F: GroupSubset, rows: np.ndarray) -> np.ndarray:
    """Proper-colouring test ``x(σγ) ≠ x(γ)`` for all γ, σ in F, without
    building a pattern table (usable for large windows and alphabets)."""
    G = F.group
    ok = np.ones(len(rows), dtype=bool)
    for s in F:
        ok &= (rows[:, G.table[s]] != rows).all(axis=1)
    return ok


def sft_accepts_at_identity(S: SFT, rows: np.ndarray) -> np.ndarray:
    W = list(S.window)
    allowed = set(S.allowed)
    return np.array([tuple(int(v) for v in r[W]) in allowed for r in rows], dtype=bool)


@dataclass(frozen=True)
class DistinguishingSet:
    """Configurations z with ``z(σ) ≠ z(σγ)`` for some σ in S, for every γ
    in ``gammas`` (a condition read at the identity only)."""

    S: GroupSubset
    gammas: tuple
    k: int

    @property
    def window(self) -> GroupSubset:
        G = self.S.group
        return self.S | GroupSubset.of(G, [G.mul(s, g) for s in self.S for g in self.gammas])

    def accepts_rows(self, rows: np.ndarray) -> np.ndarray:
        G = self.S.group
        S = list(self.S)
        ok = np.ones(len(rows), dtype=bool)
        for g in self.gammas:
            Sg = [G.mul(s, g) for s in S]
            ok &= (rows[:, S] != rows[:, Sg]).any(axis=1)
        return ok


def accepts_at_identity(Z, rows: np.ndarray) -> np.ndarray:
    if isinstance(Z, SFT):
        return sft_accepts_at_identity(Z, rows)
    return Z.accepts_rows(rows)


def invariant_members(Z, rows: np.ndarray) -> np.ndarray:
    """Rows in ``⋂_δ δ·Z``: every shift of the row passes the identity test."""
    G = (Z.window if isinstance(Z, SFT) else Z.S).group
    ok = np.ones(len(rows), dtype=bool)
    for g in range(G.order):
        ok &= accepts_at_identity(Z, rows[:, G.table[:, g]])
    return ok
