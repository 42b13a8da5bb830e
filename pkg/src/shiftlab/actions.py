"""Finite group actions and (partial) functions on their points.

Points of a :class:`FiniteAction` are the integers ``0..n-1``; ``labels``
records what each point stands for (a group element for translation actions,
a configuration tuple for shift actions).  The action is stored as a table
``act[g, x]`` so that orbit and neighbourhood computations vectorise.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from . import caps
from .errors import DomainError
from .groups import FiniteGroup, GroupSubset

UNDEFINED = -1


class FiniteAction:
    """A left action of a finite group on ``n`` points."""

    def __init__(self, group: FiniteGroup, table, labels: Sequence | None = None,
                 name: str = "action"):
        if not isinstance(group, FiniteGroup):
            raise DomainError("finite actions need a finite group")
        t = np.asarray(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != group.order:
            raise DomainError("action table must have one row per group element")
        t.flags.writeable = False
        self.group = group
        self.table = t
        self.n = t.shape[1]
        self.labels = list(labels) if labels is not None else list(range(self.n))
        if len(self.labels) != self.n:
            raise DomainError("one label per point is required")
        self.name = name
        self._index = None

    @property
    def points(self) -> range:
        return range(self.n)

    def act(self, g, x: int) -> int:
        return int(self.table[g, x])

    def index_of(self, label) -> int:
        if self._index is None:
            self._index = {lab: i for i, lab in enumerate(self.labels)}
        return self._index[label]

    def image(self, S: GroupSubset | Iterable[int], points: Iterable[int]) -> set[int]:
        """The set ``S · P`` of all ``σ·x``."""
        els = list(S)
        pts = np.fromiter(points, dtype=np.int64)
        if not els or pts.size == 0:
            return set()
        return set(np.unique(self.table[np.ix_(els, pts)]).tolist())

    def orbit_of_set(self, S, x: int) -> list[int]:
        """``σ·x`` for σ in S, in the order of S."""
        return [int(self.table[s, x]) for s in S]

    def core(self, D, A: Iterable[int]) -> set[int]:
        """``{x : D·x ⊆ A}``."""
        mask = np.zeros(self.n, dtype=bool)
        mask[list(A)] = True
        els = list(D)
        if not els:
            return set(range(self.n))
        ok = mask[self.table[els]].all(axis=0)
        return set(np.nonzero(ok)[0].tolist())

    def stabilizer(self, x: int) -> GroupSubset:
        return GroupSubset(self.group, tuple(int(g) for g in np.nonzero(self.table[:, x] == x)[0]))

    def is_free(self) -> bool:
        return bool((self.table[1:] != np.arange(self.n)[None, :]).all()) if self.group.order > 1 else True

    def is_F_free(self, F: GroupSubset) -> bool:
        """True iff no non-identity element of F fixes a point."""
        els = [f for f in F if f != 0]
        if not els:
            return True
        return bool((self.table[els] != np.arange(self.n)[None, :]).all())

    def verify(self) -> bool:
        """Exhaustively check the identity and composition laws."""
        if not np.array_equal(self.table[0], np.arange(self.n)):
            return False
        G = self.group
        for g in range(G.order):
            # act(gh, x) == act(g, act(h, x)) for all h, x at once
            if not np.array_equal(self.table[G.table[g]], self.table[g][self.table]):
                return False
        return True


def translation_action(G: FiniteGroup) -> FiniteAction:
    """Left multiplication ``γ·x = γx``: the action underlying Cayley graphs."""
    return FiniteAction(G, G.table.copy(), labels=list(range(G.order)), name="translation")


def shift_table(G: FiniteGroup, configs: np.ndarray) -> np.ndarray:
    """Rows of ``configs`` shifted by every group element.

    Returns an array ``out[g, i, :]`` holding ``g·configs[i]``, using
    ``(g·x)(δ) = x(δg)``.
    """
    # column δ of g·x is column δg of x
    return configs[:, G.table.T].transpose(1, 0, 2)


def shift_action(G: FiniteGroup, configs: Iterable[Sequence[int]], k: int,
                 close: bool = False) -> FiniteAction:
    """The shift action on a stored, shift-invariant list of configurations.

    With ``close=True`` the list is first closed under the shift; otherwise
    a non-invariant list is rejected.  Points are ordered by lexicographic
    order of the configurations.
    """
    arr = np.array([list(c) for c in configs], dtype=np.int64).reshape(-1, G.order)
    if arr.size and (arr.min() < 0 or arr.max() >= k):
        raise DomainError("configuration values out of alphabet range")
    if close and len(arr):
        arr = np.unique(shift_table(G, arr).reshape(-1, G.order), axis=0)
    else:
        arr = np.unique(arr, axis=0) if len(arr) else arr
    caps.check(arr.shape[0] * G.order, "shift action table")
    codes = _codes(arr, k)
    shifted = shift_table(G, arr)  # (|G|, n, |G|)
    scodes = _codes(shifted.reshape(-1, G.order), k).reshape(G.order, -1)
    pos = np.searchsorted(codes, scodes)
    pos = np.clip(pos, 0, max(len(codes) - 1, 0))
    if len(codes) and not np.array_equal(codes[pos], scodes):
        raise DomainError("configuration list is not shift-invariant")
    labels = [tuple(int(v) for v in row) for row in arr]
    act = FiniteAction(G, pos, labels=labels, name="shift")
    act.k = k
    act.configs = arr
    return act


def _codes(arr: np.ndarray, k: int) -> np.ndarray:
    """Lexicographic integer codes of rows (first column most significant)."""
    n = arr.shape[1] if arr.ndim == 2 else 0
    if n * max(k - 1, 1).bit_length() > 62:
        # fall back to object arithmetic for very long rows
        w = [k ** (n - 1 - i) for i in range(n)]
        return np.array([sum(int(v) * wi for v, wi in zip(row, w)) for row in arr], dtype=object)
    w = np.array([k ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    return arr @ w if arr.size else np.zeros(0, dtype=np.int64)


class PointFunction:
    """A function from (a subset of) the points of an action to ``{0..k-1}``.

    Stored as an integer array with ``-1`` marking undefined points.
    """

    def __init__(self, action: FiniteAction, values, k: int | None = None):
        v = np.asarray(values, dtype=np.int64).copy()
        if v.shape != (action.n,):
            raise DomainError("one value (or -1) per point is required")
        if (v < UNDEFINED).any():
            raise DomainError("values must be -1 (undefined) or nonnegative")
        self.action = action
        self.values = v
        self.k = int(k) if k is not None else int(v.max()) + 1 if (v >= 0).any() else 1
        if (v >= self.k).any():
            raise DomainError("value exceeds alphabet size")

    @classmethod
    def empty(cls, action: FiniteAction, k: int) -> PointFunction:
        return cls(action, np.full(action.n, UNDEFINED), k)

    @classmethod
    def from_dict(cls, action: FiniteAction, mapping: dict, k: int) -> PointFunction:
        v = np.full(action.n, UNDEFINED)
        for x, c in mapping.items():
            v[x] = c
        return cls(action, v, k)

    @property
    def domain(self) -> set[int]:
        return set(np.nonzero(self.values >= 0)[0].tolist())

    @property
    def is_total(self) -> bool:
        return bool((self.values >= 0).all())

    def __getitem__(self, x: int) -> int:
        return int(self.values[x])

    def defined(self, x: int) -> bool:
        return self.values[x] >= 0

    def restrict(self, points: Iterable[int]) -> PointFunction:
        v = np.full(self.action.n, UNDEFINED)
        idx = list(points)
        v[idx] = self.values[idx]
        return PointFunction(self.action, v, self.k)

    def extends(self, other: PointFunction) -> bool:
        m = other.values >= 0
        return bool(np.array_equal(self.values[m], other.values[m]))

    def merged(self, other: PointFunction) -> PointFunction:
        """Union of two functions that agree on their common domain."""
        both = (self.values >= 0) & (other.values >= 0)
        if not np.array_equal(self.values[both], other.values[both]):
            raise DomainError("functions disagree on their common domain")
        v = np.where(self.values >= 0, self.values, other.values)
        return PointFunction(self.action, v, max(self.k, other.k))

    def copy(self) -> PointFunction:
        return PointFunction(self.action, self.values, self.k)

    def __eq__(self, other):
        return (isinstance(other, PointFunction) and other.action is self.action
                and np.array_equal(self.values, other.values))

    def tolist(self) -> list[int]:
        return [int(v) for v in self.values]
