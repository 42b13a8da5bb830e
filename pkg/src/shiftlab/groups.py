"""Exact arithmetic for groups and finite subsets of groups.

Three families are supported:

* finite groups given by a multiplication table (cyclic, dihedral, direct
  products and arbitrary tables), whose elements are the integers
  ``0..order-1`` with the identity at ``0``;
* integer lattices ``Z^d``, with elements stored as integer tuples;
* free groups of finite rank, with elements stored as reduced words.  A word
  is a tuple of nonzero integers where ``i+1`` is the ``i``-th generator and
  ``-(i+1)`` its inverse.

Every group has a canonical total order on its elements (``Group.key``).
Greedy procedures elsewhere in the package scan elements in this order, which
makes all of their outputs reproducible.
"""

from __future__ import annotations

import itertools
import string
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import caps
from .errors import CapExceeded, DomainError


class Group:
    """Abstract group with exact operations and a canonical element order."""

    kind: str = "abstract"
    order: int | None = None  # None means infinite
    identity = None

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def key(self, g):
        raise NotImplementedError

    def contains(self, g) -> bool:
        raise NotImplementedError

    def elements(self) -> Iterator:
        """Yield the elements in canonical order (forever if infinite)."""
        raise NotImplementedError

    def encode(self, g):
        raise NotImplementedError

    def decode(self, obj):
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError

    def generators(self) -> list:
        """A standard generating set (used by ``ball`` and by tests)."""
        raise NotImplementedError

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    def check(self, g):
        if not self.contains(g):
            raise DomainError(f"{g!r} is not an element of {self}")
        return g

    def subset(self, elements: Iterable = ()) -> GroupSubset:
        return GroupSubset.of(self, elements)

    def conj(self, g, h):
        """Return ``g h g^-1``."""
        return self.mul(self.mul(g, h), self.inv(g))

    def __eq__(self, other):
        return isinstance(other, Group) and self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash(repr(self.descriptor()))

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor()})"


class FiniteGroup(Group):
    """A finite group presented by its Cayley table.

    ``table[g, h]`` is the product ``gh``.  The constructor verifies that
    0 is the identity and that every row and column is a permutation;
    associativity is checked by ``verify``.
    """

    identity = 0

    def __init__(self, table, kind: str = "table", descriptor: dict | None = None):
        t = np.asarray(table, dtype=np.int64)
        n = t.shape[0]
        if t.ndim != 2 or t.shape != (n, n) or n == 0:
            raise DomainError("multiplication table must be a nonempty square array")
        ids = np.arange(n)
        if not (np.array_equal(t[0], ids) and np.array_equal(t[:, 0], ids)):
            raise DomainError("element 0 must be the two-sided identity")
        if not all(np.array_equal(np.sort(t[i]), ids) for i in range(n)):
            raise DomainError("rows of the table must be permutations")
        if not all(np.array_equal(np.sort(t[:, i]), ids) for i in range(n)):
            raise DomainError("columns of the table must be permutations")
        t.flags.writeable = False
        self.table = t
        self.order = n
        self.kind = kind
        self._descriptor = descriptor or {"kind": "table", "mul": t.tolist()}
        inv = np.empty(n, dtype=np.int64)
        rows, cols = np.nonzero(t == 0)
        inv[rows] = cols
        inv.flags.writeable = False
        self.inv_table = inv

    def mul(self, g, h):
        return int(self.table[self.check(g), self.check(h)])

    def inv(self, g):
        return int(self.inv_table[self.check(g)])

    def key(self, g):
        return g

    def contains(self, g) -> bool:
        return isinstance(g, (int, np.integer)) and not isinstance(g, bool) and 0 <= g < self.order

    def elements(self):
        return iter(range(self.order))

    def encode(self, g):
        return int(g)

    def decode(self, obj):
        return self.check(int(obj))

    def descriptor(self):
        return self._descriptor

    def generators(self):
        return list(range(1, self.order))

    def verify(self) -> bool:
        """Exhaustively check associativity of the table."""
        t = self.table
        # (gh)k == g(hk) for all triples, vectorised over the last index
        for g in range(self.order):
            if not np.array_equal(t[t[g]], t[g][t]):
                return False
        return True

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))


def cyclic(n: int) -> FiniteGroup:
    """The cyclic group Z_n written additively."""
    if n < 1:
        raise DomainError("cyclic group order must be positive")
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, kind="cyclic",
                       descriptor={"kind": "cyclic", "n": n})


def dihedral(n: int) -> FiniteGroup:
    """The dihedral group of order ``2n``.

    The element ``r^i s^j`` is stored at index ``i + n*j``; ``r`` is the
    rotation (index 1) and ``s`` the reflection (index ``n``), with
    ``s r s = r^-1``.
    """
    if n < 1:
        raise DomainError("dihedral parameter must be positive")
    order = 2 * n
    t = np.empty((order, order), dtype=np.int64)
    for a in range(order):
        i, j = a % n, a // n
        for b in range(order):
            k, m = b % n, b // n
            # r^i s^j r^k s^m = r^(i + (-1)^j k) s^(j+m)
            rot = (i + (k if j == 0 else -k)) % n
            t[a, b] = rot + n * ((j + m) % 2)
    return FiniteGroup(t, kind="dihedral", descriptor={"kind": "dihedral", "n": n})


def direct_product(*factors: FiniteGroup) -> FiniteGroup:
    """Direct product with mixed-radix indexing, first factor most significant."""
    if not factors:
        raise DomainError("direct product needs at least one factor")
    for f in factors:
        if not isinstance(f, FiniteGroup):
            raise DomainError("direct products are only supported for finite factors")
    sizes = [f.order for f in factors]
    order = int(np.prod(sizes))
    digits = np.array(list(itertools.product(*[range(s) for s in sizes])), dtype=np.int64)
    weights = np.array([int(np.prod(sizes[i + 1:])) for i in range(len(sizes))], dtype=np.int64)
    t = np.zeros((order, order), dtype=np.int64)
    for i, f in enumerate(factors):
        t += f.table[digits[:, i][:, None], digits[:, i][None, :]] * weights[i]
    desc = {"kind": "product", "factors": [f.descriptor() for f in factors]}
    g = FiniteGroup(t, kind="product", descriptor=desc)
    g.factors = tuple(factors)
    return g


def from_table(mul) -> FiniteGroup:
    g = FiniteGroup(mul)
    if not g.verify():
        raise DomainError("multiplication table is not associative")
    return g


class Lattice(Group):
    """The free abelian group Z^d; elements are integer tuples of length d.

    Canonical order: by max-norm, then lexicographically.
    """

    kind = "lattice"
    order = None

    def __init__(self, d: int):
        if d < 1:
            raise DomainError("lattice dimension must be positive")
        self.d = d
        self.identity = (0,) * d

    def contains(self, g):
        return isinstance(g, tuple) and len(g) == self.d and all(
            isinstance(c, (int, np.integer)) for c in g)

    def mul(self, g, h):
        self.check(g), self.check(h)
        return tuple(int(a + b) for a, b in zip(g, h))

    def inv(self, g):
        return tuple(-int(a) for a in self.check(g))

    def key(self, g):
        return (max((abs(c) for c in g), default=0), g)

    def elements(self):
        yield self.identity
        r = 1
        while True:
            shell = [p for p in itertools.product(range(-r, r + 1), repeat=self.d)
                     if max(abs(c) for c in p) == r]
            yield from sorted(shell)
            r += 1

    def encode(self, g):
        return list(g)

    def decode(self, obj):
        return self.check(tuple(int(c) for c in obj))

    def descriptor(self):
        return {"kind": "lattice", "d": self.d}

    def generators(self):
        gens = []
        for i in range(self.d):
            e = [0] * self.d
            e[i] = 1
            gens.append(tuple(e))
        return gens


class FreeGroup(Group):
    """The free group on ``rank`` generators, elements as reduced words.

    The letters ``i+1`` and ``-(i+1)`` are printed as the ``i``-th lowercase
    and uppercase letter.  Canonical order: by word length, then
    lexicographically with letters ordered ``a < A < b < B < ...``.
    """

    kind = "free"
    order = None
    identity = ()

    def __init__(self, rank: int):
        if not 1 <= rank <= 26:
            raise DomainError("free group rank must be between 1 and 26")
        self.rank = rank

    def contains(self, g):
        if not isinstance(g, tuple):
            return False
        for i, c in enumerate(g):
            if not isinstance(c, (int, np.integer)) or c == 0 or abs(c) > self.rank:
                return False
            if i and g[i - 1] == -c:
                return False
        return True

    @staticmethod
    def reduce(word) -> tuple:
        out: list[int] = []
        for c in word:
            if out and out[-1] == -c:
                out.pop()
            else:
                out.append(int(c))
        return tuple(out)

    def mul(self, g, h):
        self.check(g), self.check(h)
        # only the junction can cancel
        i = 0
        while i < min(len(g), len(h)) and g[len(g) - 1 - i] == -h[i]:
            i += 1
        return g[:len(g) - i] + h[i:]

    def inv(self, g):
        return tuple(-c for c in reversed(self.check(g)))

    @staticmethod
    def _letter_key(c):
        return (abs(c), 0 if c > 0 else 1)

    def key(self, g):
        return (len(g), tuple(self._letter_key(c) for c in g))

    def elements(self):
        letters = sorted([i for i in range(1, self.rank + 1)] + [-i for i in range(1, self.rank + 1)],
                         key=self._letter_key)
        level = [()]
        yield ()
        while True:
            nxt = []
            for w in level:
                for c in letters:
                    if w and w[-1] == -c:
                        continue
                    nxt.append(w + (c,))
            yield from nxt
            level = nxt

    def encode(self, g):
        return "".join(string.ascii_lowercase[c - 1] if c > 0 else string.ascii_uppercase[-c - 1]
                       for c in g)

    def decode(self, obj):
        if not isinstance(obj, str):
            raise DomainError(f"free group elements are encoded as strings, got {obj!r}")
        word = []
        for ch in obj:
            if ch in string.ascii_lowercase:
                word.append(string.ascii_lowercase.index(ch) + 1)
            elif ch in string.ascii_uppercase:
                word.append(-(string.ascii_uppercase.index(ch) + 1))
            else:
                raise DomainError(f"bad letter {ch!r} in free group word")
        return self.check(self.reduce(word))

    def word(self, text: str):
        """Parse a word such as ``"abA"`` (no reduction check)."""
        return self.decode(text)

    def descriptor(self):
        return {"kind": "free", "rank": self.rank}

    def generators(self):
        return [(i,) for i in range(1, self.rank + 1)]


def group_from_descriptor(desc: dict) -> Group:
    """Build a group from its JSON descriptor."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise DomainError("group descriptor must be an object with a 'kind'")
    kind = desc["kind"]
    if kind == "cyclic":
        return cyclic(int(desc["n"]))
    if kind == "dihedral":
        return dihedral(int(desc["n"]))
    if kind == "product":
        return direct_product(*[group_from_descriptor(f) for f in desc["factors"]])
    if kind == "lattice":
        return Lattice(int(desc["d"]))
    if kind == "free":
        return FreeGroup(int(desc["rank"]))
    if kind == "table":
        return from_table(desc["mul"])
    raise DomainError(f"unknown group kind {kind!r}")


@dataclass(frozen=True)
class GroupSubset:
    """A finite set of elements of one group, stored sorted in canonical order.

    Supports the subset algebra used throughout: ``A * B`` is the product
    set, ``A ** e`` the e-fold product, ``A.inverse()`` the pointwise inverse,
    and ``|``, ``&``, ``-`` the usual set operations.
    """

    group: Group
    elements: tuple

    @classmethod
    def of(cls, group: Group, elements: Iterable = ()) -> GroupSubset:
        items = {group.check(group.decode(e) if isinstance(e, (str, list)) else e)
                 for e in elements}
        items = {int(e) if isinstance(e, np.integer) else e for e in items}
        return cls(group, tuple(sorted(items, key=group.key)))

    @classmethod
    def _trusted(cls, group, items) -> GroupSubset:
        return cls(group, tuple(sorted(set(items), key=group.key)))

    def _same(self, other: GroupSubset):
        if not isinstance(other, GroupSubset) or other.group != self.group:
            raise DomainError("subsets belong to different groups")

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self.as_set

    @cached_property
    def as_set(self) -> frozenset:
        return frozenset(self.elements)

    def __hash__(self):
        return hash(self.elements)

    def __eq__(self, other):
        return (isinstance(other, GroupSubset) and self.group == other.group
                and self.elements == other.elements)

    def __mul__(self, other: GroupSubset) -> GroupSubset:
        return product(self, other)

    def __pow__(self, e: int) -> GroupSubset:
        return power(self, e)

    def __or__(self, other):
        self._same(other)
        return GroupSubset._trusted(self.group, self.as_set | other.as_set)

    def __and__(self, other):
        self._same(other)
        return GroupSubset._trusted(self.group, self.as_set & other.as_set)

    def __sub__(self, other):
        self._same(other)
        return GroupSubset._trusted(self.group, self.as_set - other.as_set)

    def __le__(self, other):
        self._same(other)
        return self.as_set <= other.as_set

    def __ge__(self, other):
        self._same(other)
        return self.as_set >= other.as_set

    def isdisjoint(self, other) -> bool:
        self._same(other)
        return self.as_set.isdisjoint(other.as_set)

    def inverse(self) -> GroupSubset:
        return GroupSubset._trusted(self.group, (self.group.inv(g) for g in self.elements))

    def left(self, g) -> GroupSubset:
        """The translate ``gA``."""
        return GroupSubset._trusted(self.group, (self.group.mul(g, a) for a in self.elements))

    def right(self, g) -> GroupSubset:
        """The translate ``Ag``."""
        return GroupSubset._trusted(self.group, (self.group.mul(a, g) for a in self.elements))

    def encode(self) -> list:
        return [self.group.encode(g) for g in self.elements]

    def __repr__(self):
        return f"GroupSubset({self.encode()})"


def mul(group: Group, g, h):
    return group.mul(g, h)


def inv(group: Group, g):
    return group.inv(g)


def product(A: GroupSubset, B: GroupSubset) -> GroupSubset:
    A._same(B)
    G = A.group
    if not A.elements or not B.elements:
        return GroupSubset(G, ())
    if isinstance(G, FiniteGroup):
        vals = np.unique(G.table[np.ix_(list(A.elements), list(B.elements))])
        return GroupSubset(G, tuple(int(v) for v in vals))
    return GroupSubset._trusted(G, (G.mul(a, b) for a in A.elements for b in B.elements))


def power(A: GroupSubset, e: int) -> GroupSubset:
    if e < 0:
        raise DomainError("exponent must be nonnegative")
    result = GroupSubset(A.group, (A.group.identity,))
    for _ in range(e):
        nxt = product(A, result)
        if nxt == result:  # stabilised (only possible once the set is a subgroup)
            break
        result = nxt
    return result


def symmetrize(A: GroupSubset, include_identity: bool) -> GroupSubset:
    """``A ∪ A^-1`` with the identity added or removed according to the flag."""
    s = A | A.inverse()
    ident = GroupSubset(A.group, (A.group.identity,))
    return s | ident if include_identity else s - ident


def ball(G: Group, gens: GroupSubset | Iterable, r: int) -> GroupSubset:
    """All products of at most ``r`` elements of the symmetrised generators."""
    if not isinstance(gens, GroupSubset):
        gens = GroupSubset.of(G, gens)
    if gens.group != G:
        raise DomainError("generators belong to a different group")
    if r < 0:
        raise DomainError("radius must be nonnegative")
    S = symmetrize(gens, True)
    seen = {G.identity}
    frontier = [G.identity]
    for _ in range(r):
        nxt = []
        for g in frontier:
            for s in S.elements:
                h = G.mul(s, g)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
        if not frontier:
            break
    return GroupSubset._trusted(G, seen)


def generated_subgroup(G: FiniteGroup, gens: Iterable) -> GroupSubset:
    """Closure of ``gens`` under multiplication in a finite group."""
    found = {0}
    frontier = [0]
    gens = list(gens)
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = G.mul(g, s)
                if h not in found:
                    found.add(h)
                    nxt.append(h)
        frontier = nxt
    return GroupSubset._trusted(G, found)


def is_subgroup(H: GroupSubset) -> bool:
    G = H.group
    if G.identity not in H:
        return False
    return all(G.mul(a, G.inv(b)) in H for a in H for b in H)


def is_normal(H: GroupSubset, conjugators: Iterable | None = None) -> bool:
    G = H.group
    if conjugators is None:
        conjugators = G.elements()
    return all(G.conj(g, h) in H for g in conjugators for h in H)


def subgroups(G: FiniteGroup) -> list[GroupSubset]:
    """All subgroups of a small finite group, sorted by (size, elements)."""
    if not isinstance(G, FiniteGroup):
        raise DomainError("subgroup enumeration needs a finite group")
    if G.order > caps.SUBGROUP_ORDER_CAP:
        raise CapExceeded(f"group order {G.order} exceeds subgroup cap {caps.SUBGROUP_ORDER_CAP}")
    trivial = GroupSubset(G, (0,))
    found = {trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for H in frontier:
            for g in range(G.order):
                if g in H:
                    continue
                K = generated_subgroup(G, H.elements + (g,))
                if K not in found:
                    found.add(K)
                    nxt.append(K)
        frontier = nxt
    return sorted(found, key=lambda H: (len(H), H.elements))


def normal_subgroups(G: FiniteGroup) -> list[GroupSubset]:
    return [H for H in subgroups(G) if is_normal(H)]


def enumerate_nonidentity(G: Group, count: int) -> list:
    if count < 0:
        raise DomainError("count must be nonnegative")
    if G.is_finite and count > G.order - 1:
        raise DomainError(f"group of order {G.order} has only {G.order - 1} non-identity elements")
    out = []
    for g in G.elements():
        if len(out) >= count:
            break
        if g != G.identity:
            out.append(g)
    return out


def first_elements(G: Group, count: int) -> list:
    """The first ``count`` elements in canonical order, identity included."""
    return list(itertools.islice(G.elements(), count))
